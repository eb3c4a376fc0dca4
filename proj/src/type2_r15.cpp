#include "nrcb/type2_r15.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "nrcb/quantization.hpp"
#include "nrcb/search_tools.hpp"

namespace nrcb {

int k2_limit(int L) { return L == 4 ? 6 : 4; }

void validate_config(const T2R15Config& c) {
  require(c.L >= 2 && c.L <= 4, "type2_r15: L must be 2, 3 or 4");
  require(c.n_psk == 4 || c.n_psk == 8, "type2_r15: N_PSK must be 4 or 8");
  require(c.rank == 1 || c.rank == 2, "type2_r15: rank must be 1 or 2");
  require(c.subband_count >= 1, "type2_r15: subband count must be positive");
  if (c.variant == CodebookVariant::Regular) {
    validate_geometry(c.geom);
    require(c.L <= c.geom.n1 * c.geom.n2, "type2_r15: L exceeds the beams of one group");
  } else {
    require(is_valid_port_count(c.p_csirs), "type2_r15: invalid CSI-RS port count");
    require(c.d >= 1 && c.d <= 4 && c.d <= std::min(c.p_csirs / 2, c.L),
            "type2_r15: d must satisfy 1 <= d <= min(P/2, L, 4)");
    require(c.L <= c.p_csirs / 2, "type2_r15: L exceeds P/2");
  }
}

namespace {

int ps_i11_count(const T2R15Config& c) { return (c.p_csirs + 2 * c.d - 1) / (2 * c.d); }

void check_shape(const T2R15Config& c, const T2R15Layer& l) {
  const size_t n = 2 * c.L;
  if (l.k1.size() != n) throw FormatError("type2_r15: i14 must hold 2L values");
  if (l.k2.size() != static_cast<size_t>(c.subband_count) ||
      l.c.size() != static_cast<size_t>(c.subband_count))
    throw FormatError("type2_r15: one i21/i22 entry per subband is required");
  for (int s = 0; s < c.subband_count; ++s)
    if (l.k2[s].size() != n || l.c[s].size() != n)
      throw FormatError("type2_r15: every subband entry must hold 2L values");
}

std::vector<R15Report> classify(const T2R15Config& c, const T2R15Layer& l) {
  const int n = 2 * c.L;
  std::vector<R15Report> out(n, R15Report::None);
  std::vector<int> nonzero;
  for (int i = 0; i < n; ++i) {
    if (i == l.i13) {
      out[i] = R15Report::Strongest;
    } else if (l.k1[i] > 0) {
      nonzero.push_back(i);
    }
  }
  if (!c.subband_amplitude) {
    for (int i : nonzero) out[i] = R15Report::Phase;
    return out;
  }
  std::stable_sort(nonzero.begin(), nonzero.end(),
                   [&](int a, int b) { return l.k1[a] > l.k1[b]; });
  const int m = static_cast<int>(nonzero.size()) + 1;
  const int strong = std::min(m, k2_limit(c.L)) - 1;
  for (int j = 0; j < static_cast<int>(nonzero.size()); ++j)
    out[nonzero[j]] = j < strong ? R15Report::AmpAndPhase : R15Report::CoarsePhase;
  return out;
}

}  // namespace

std::vector<std::vector<R15Report>> reporting_mask(const T2R15Config& c, const T2R15Pmi& p) {
  std::vector<std::vector<R15Report>> out;
  for (const auto& l : p.layers) {
    check_shape(c, l);
    require(l.i13 >= 0 && l.i13 < 2 * c.L, "type2_r15: i13 out of range");
    out.push_back(classify(c, l));
  }
  return out;
}

void validate_pmi(const T2R15Config& c, const T2R15Pmi& p) {
  validate_config(c);
  if (static_cast<int>(p.layers.size()) != c.rank)
    throw FormatError("type2_r15: layer count must equal the rank");
  if (c.variant == CodebookVariant::Regular) {
    require(p.q1 >= 0 && p.q1 < c.geom.o1 && p.q2 >= 0 && p.q2 < c.geom.o2,
            "type2_r15: (q1,q2) out of range");
    require(p.i12 < binomial(c.geom.n1 * c.geom.n2, c.L), "type2_r15: i12 out of range");
  } else {
    require(p.i11 >= 0 && p.i11 < ps_i11_count(c), "type2_r15: port-selection i11 out of range");
  }
  const auto mask = reporting_mask(c, p);
  for (size_t li = 0; li < p.layers.size(); ++li) {
    const auto& l = p.layers[li];
    for (int i = 0; i < 2 * c.L; ++i) {
      require(l.k1[i] >= 0 && l.k1[i] <= 7, "type2_r15: wideband amplitude index out of range");
      const R15Report r = mask[li][i];
      if (r == R15Report::Strongest && l.k1[i] != 7)
        throw ConsistencyError("type2_r15: strongest coefficient must carry k1 = 7");
      for (int s = 0; s < c.subband_count; ++s) {
        const int k2 = l.k2[s][i];
        const int ph = l.c[s][i];
        switch (r) {
          case R15Report::Strongest:
          case R15Report::None:
            if (k2 != 1 || ph != 0)
              throw ConsistencyError("type2_r15: unreported coefficient must hold k2 = 1, c = 0");
            break;
          case R15Report::AmpAndPhase:
            require(k2 == 0 || k2 == 1, "type2_r15: subband amplitude index out of range");
            require(ph >= 0 && ph < c.n_psk, "type2_r15: phase index out of range");
            break;
          case R15Report::Phase:
            if (k2 != 1) throw ConsistencyError("type2_r15: unreported subband amplitude must be 1");
            require(ph >= 0 && ph < c.n_psk, "type2_r15: phase index out of range");
            break;
          case R15Report::CoarsePhase:
            if (k2 != 1) throw ConsistencyError("type2_r15: unreported subband amplitude must be 1");
            require(ph >= 0 && ph < 4, "type2_r15: coarse phase index must lie in 0..3");
            break;
        }
      }
    }
  }
}

std::vector<std::pair<int, int>> r15_beam_coords(const T2R15Config& c, const T2R15Pmi& p) {
  require(c.variant == CodebookVariant::Regular, "r15_beam_coords: regular variant only");
  const int nb = c.geom.n1 * c.geom.n2;
  std::vector<std::pair<int, int>> out;
  for (int flat : decode_combination(p.i12, nb, c.L)) {
    const auto [n1, n2] = split_beam_index(flat, c.geom.n1, c.geom.n2);
    out.emplace_back(c.geom.o1 * n1 + p.q1, c.geom.o2 * n2 + p.q2);
  }
  return out;
}

std::vector<CVec> r15_basis(const T2R15Config& c, const T2R15Pmi& p) {
  std::vector<CVec> out;
  if (c.variant == CodebookVariant::Regular) {
    for (const auto& [l, m] : r15_beam_coords(c, p)) out.push_back(dft_beam(c.geom, l, m));
  } else {
    const int half = c.p_csirs / 2;
    for (int i = 0; i < c.L; ++i)
      out.push_back(port_selection_basis(c.p_csirs, (p.i11 * c.d + i) % half).cast<cd>());
  }
  return out;
}

std::vector<cd> r15_coefficients(const T2R15Config& c, const T2R15Pmi& p, int layer, int subband) {
  const auto mask = reporting_mask(c, p);
  const auto& l = p.layers.at(layer);
  std::vector<cd> out(2 * c.L);
  for (int i = 0; i < 2 * c.L; ++i) {
    const double p1 = amp_r15_wideband(l.k1[i]);
    const double p2 = c.subband_amplitude ? amp_r15_subband(l.k2[subband][i]) : 1.0;
    const int alphabet = mask[layer][i] == R15Report::CoarsePhase ? 4 : c.n_psk;
    out[i] = p1 * p2 * unit_phase(l.c[subband][i], alphabet);
  }
  return out;
}

CMat reconstruct(const T2R15Config& c, const T2R15Pmi& p, int subband) {
  validate_pmi(c, p);
  require(subband >= 0 && subband < c.subband_count, "type2_r15: subband out of range");
  const auto basis = r15_basis(c, p);
  const int half = basis[0].size();
  const double basis_energy = basis[0].squaredNorm();  // N1N2 or 1
  CMat w(2 * half, c.rank);
  for (int li = 0; li < c.rank; ++li)
    w.col(li) = combine_beams(basis, r15_coefficients(c, p, li, subband), basis_energy);
  if (c.rank == 2) w /= std::sqrt(2.0);
  return w;
}

CVec combine_beams(const std::vector<CVec>& basis, const std::vector<cd>& coef,
                   double basis_energy) {
  const size_t L = basis.size();
  require(coef.size() == 2 * L, "combine_beams: need 2L coefficients");
  const int half = static_cast<int>(basis[0].size());
  double beta = 0;
  for (const auto& x : coef) beta += std::norm(x);
  if (!(beta > 0)) throw DegenerateError("combining coefficients are all zero");
  CVec w = CVec::Zero(2 * half);
  for (size_t i = 0; i < L; ++i) {
    w.head(half) += coef[i] * basis[i];
    w.tail(half) += coef[i + L] * basis[i];
  }
  return w / std::sqrt(basis_energy * beta);
}

R15AmpCaps no_restriction(const ArrayGeometry& g) {
  R15AmpCaps caps;
  caps.cap.assign(static_cast<size_t>(g.n1 * g.o1) * g.n2 * g.o2, 1.0);
  return caps;
}

R15AmpCaps subset_restriction(const std::vector<bool>& b1, const std::vector<bool>& b2,
                              const ArrayGeometry& g) {
  validate_geometry(g);
  if (b1.size() != 11) throw FormatError("subset_restriction: B1 must hold 11 bits");
  const size_t block = 2 * g.n1 * g.n2;
  if (b2.size() != 4 * block) throw FormatError("subset_restriction: B2 must hold 8*N1*N2 bits");
  u64 beta1 = 0;
  for (bool bit : b1) beta1 = (beta1 << 1) | (bit ? 1u : 0u);
  if (beta1 >= binomial(g.o1 * g.o2, 4))
    throw FormatError("subset_restriction: beta1 = " + std::to_string(beta1) +
                      " is not a valid group combination");
  R15AmpCaps caps = no_restriction(g);
  caps.groups = decode_group_restriction(beta1, g.o1, g.o2);
  for (int k = 0; k < 4; ++k) {
    const auto& gr = caps.groups[k];
    for (int x1 = 0; x1 < g.n1; ++x1) {
      for (int x2 = 0; x2 < g.n2; ++x2) {
        // Each block is sent from label 2N1N2-1 down to label 0.
        const size_t label = 2 * (g.n1 * x2 + x1);
        const size_t hi = k * block + (block - 1 - (label + 1));
        const int bits = (b2[hi] ? 2 : 0) | (b2[hi + 1] ? 1 : 0);
        const int l = g.n1 * gr.r1 + x1;
        const int m = g.n2 * gr.r2 + x2;
        caps.cap[static_cast<size_t>(g.n2 * g.o2) * l + m] = max_amp_restriction(bits);
      }
    }
  }
  return caps;
}

bool respects_restriction(const T2R15Config& c, const T2R15Pmi& p, const R15AmpCaps& caps) {
  if (c.variant != CodebookVariant::Regular) return true;
  const auto coords = r15_beam_coords(c, p);
  for (const auto& l : p.layers)
    for (int i = 0; i < 2 * c.L; ++i) {
      const auto [bl, bm] = coords[i % c.L];
      if (amp_r15_wideband(l.k1[i]) > caps.for_beam(c.geom, bl, bm) + 1e-12) return false;
    }
  return true;
}

namespace {

}  // namespace

double group_score(const std::vector<CVec>& group, const std::vector<CVec>& targets, int L) {
  std::vector<double> e;
  for (const auto& b : group) {
    double x = 0;
    for (const auto& t : targets) x += std::norm(b.dot(t));
    e.push_back(x);
  }
  std::sort(e.begin(), e.end(), std::greater<>());
  return std::accumulate(e.begin(), e.begin() + std::min<size_t>(L, e.size()), 0.0);
}

std::vector<std::pair<int, int>> tied_groups(const ArrayGeometry& g, const std::vector<CVec>& targets,
                                             int L) {
  std::vector<std::pair<int, int>> all;
  std::vector<double> score, peak;
  int arg = 0;
  for (int q1 = 0; q1 < g.o1; ++q1)
    for (int q2 = 0; q2 < g.o2; ++q2) {
      const auto group = orthogonal_group(g, q1, q2);
      all.push_back({q1, q2});
      score.push_back(group_score(group, targets, L));
      peak.push_back(group_score(group, targets, 1));
      const size_t j = all.size() - 1;
      const bool more = score[j] > score[arg] * (1 + 1e-9);
      const bool tie = !more && score[j] >= score[arg] * (1 - 1e-9);
      if (more || (tie && peak[j] > peak[arg] * (1 + 1e-9))) arg = static_cast<int>(j);
    }
  std::vector<std::pair<int, int>> out{all[arg]};
  for (size_t j = 0; j < all.size(); ++j)
    if (static_cast<int>(j) != arg && score[j] >= score[arg] * (1 - 1e-9)) out.push_back(all[j]);
  return out;
}

std::pair<int, int> best_group(const ArrayGeometry& g, const std::vector<CVec>& targets, int L) {
  return tied_groups(g, targets, L).front();
}

namespace {

// Largest wideband index whose amplitude does not exceed cap.
int cap_index(double cap) {
  int k = 0;
  for (int j = 1; j <= 7; ++j)
    if (amp_r15_wideband(j) <= cap + 1e-12) k = j;
  return k;
}

}  // namespace

T2R15Pmi search_t2_r15(const std::vector<CMat>& channels, const T2R15Config& c,
                       const R15AmpCaps* caps_in) {
  validate_config(c);
  require(!channels.empty(), "search_t2_r15: no channels");
  const int P = c.ports();
  const int half = P / 2;
  for (const auto& h : channels) require(h.cols() == P, "search_t2_r15: channel width must equal P");
  const int nsb = c.subband_count;
  const int nch = static_cast<int>(channels.size());
  const std::vector<CMat> targets = layer_targets(channels, c.rank);

  // Per-subband targets: averaged over the subband's channels.
  std::vector<CMat> sb_target(nsb, CMat::Zero(P, c.rank));
  for (int m = 0; m < nch; ++m) sb_target[m * nsb / nch] += targets[m];

  // Split targets into polarization halves for the spatial fit.
  std::vector<CVec> halves;
  for (int s = 0; s < nsb; ++s)
    for (int l = 0; l < c.rank; ++l) {
      halves.push_back(sb_target[s].col(l).head(half));
      halves.push_back(sb_target[s].col(l).tail(half));
    }

  // Builds the report for one orthogonal group (ignored for port selection).
  auto build = [&](int q1, int q2) {
    T2R15Pmi pmi;
    std::vector<CVec> basis;
    std::vector<double> beam_cap(c.L, 1.0);

    if (c.variant == CodebookVariant::Regular) {
      const ArrayGeometry& g = c.geom;
      const R15AmpCaps caps = caps_in ? *caps_in : no_restriction(g);
      pmi.q1 = q1;
      pmi.q2 = q2;
      const auto group = orthogonal_group(g, pmi.q1, pmi.q2);
      std::vector<bool> allowed(group.size());
      for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j)
          allowed[i * g.n2 + j] = caps.for_beam(g, g.o1 * i + pmi.q1, g.o2 * j + pmi.q2) > 0;
      std::vector<int> chosen = omp_select(group, halves, c.L, allowed);
      // Fill up with any remaining beams if the restriction allows fewer than L.
      for (int j = 0; static_cast<int>(chosen.size()) < c.L && j < static_cast<int>(group.size()); ++j)
        if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
      // Group position i*N2+j corresponds to flat beam index i + N1*j.
      std::vector<int> flat;
      for (int pos : chosen) flat.push_back((pos / g.n2) + g.n1 * (pos % g.n2));
      std::sort(flat.begin(), flat.end());
      pmi.i12 = encode_combination(flat, g.n1 * g.n2, c.L);
      basis = r15_basis(c, pmi);
      const auto coords = r15_beam_coords(c, pmi);
      for (int i = 0; i < c.L; ++i) beam_cap[i] = caps.for_beam(g, coords[i].first, coords[i].second);
    } else {
      double best = -1;
      for (int i11 = 0; i11 < ps_i11_count(c); ++i11) {
        double e = 0;
        for (int i = 0; i < c.L; ++i) {
          const int port = (i11 * c.d + i) % half;
          for (const auto& x : halves) e += std::norm(x(port));
        }
        if (e > best * (1 + 1e-12)) {
          best = e;
          pmi.i11 = i11;
        }
      }
      basis = r15_basis(c, pmi);
    }

    for (int li = 0; li < c.rank; ++li) {
      // Least-squares coefficients per subband: [pol0 beams, pol1 beams].
      std::vector<std::vector<cd>> coef(nsb, std::vector<cd>(2 * c.L));
      for (int s = 0; s < nsb; ++s) {
        const CVec a0 = least_squares(basis, sb_target[s].col(li).head(half));
        const CVec a1 = least_squares(basis, sb_target[s].col(li).tail(half));
        for (int i = 0; i < c.L; ++i) {
          coef[s][i] = a0(i);
          coef[s][i + c.L] = a1(i);
        }
      }
      std::vector<double> energy(2 * c.L, 0.0);
      for (int i = 0; i < 2 * c.L; ++i)
        for (int s = 0; s < nsb; ++s) energy[i] += std::norm(coef[s][i]);
      T2R15Layer layer;
      int strongest = -1;
      for (int i = 0; i < 2 * c.L; ++i)
        if (beam_cap[i % c.L] >= 1.0 - 1e-12 && (strongest < 0 || energy[i] > energy[strongest]))
          strongest = i;
      if (strongest < 0) strongest = 0;
      layer.i13 = strongest;
      layer.k1.assign(2 * c.L, 0);
      layer.k2.assign(nsb, std::vector<int>(2 * c.L, 1));
      layer.c.assign(nsb, std::vector<int>(2 * c.L, 0));
      // Amplitudes relative to the strongest coefficient of each subband. The
      // subband factor never exceeds 1, so with subband amplitudes the wideband
      // value is the largest relative amplitude, otherwise their RMS.
      for (int i = 0; i < 2 * c.L; ++i) {
        if (i == strongest) {
          layer.k1[i] = 7;
          continue;
        }
        double wide = 0;
        for (int s = 0; s < nsb; ++s) {
          const double a = std::abs(coef[s][strongest]);
          const double rel = a > 0 ? std::abs(coef[s][i]) / a : 0.0;
          wide = c.subband_amplitude ? std::max(wide, rel) : wide + rel * rel;
        }
        if (!c.subband_amplitude) wide = std::sqrt(wide / nsb);
        layer.k1[i] = std::min(quantize_r15_wideband(std::min(wide, 1.0)), cap_index(beam_cap[i % c.L]));
      }
      // Phases and subband amplitudes follow the reporting classification.
      T2R15Pmi probe;
      probe.layers = {layer};
      T2R15Config one = c;
      one.rank = 1;
      const auto mask = reporting_mask(one, probe)[0];
      for (int s = 0; s < nsb; ++s) {
        const cd anchor = coef[s][strongest];
        for (int i = 0; i < 2 * c.L; ++i) {
          const R15Report r = mask[i];
          if (r == R15Report::Strongest || r == R15Report::None) continue;
          const cd rel = std::abs(anchor) > 0 ? coef[s][i] / anchor : cd(0);
          const int alphabet = r == R15Report::CoarsePhase ? 4 : c.n_psk;
          layer.c[s][i] = quantize_phase(rel, alphabet);
          if (r == R15Report::AmpAndPhase) {
            const double p1 = amp_r15_wideband(layer.k1[i]);
            layer.k2[s][i] = quantize_r15_subband(std::abs(rel) / p1);
          }
        }
      }
      pmi.layers.push_back(layer);
    }
    return pmi;
  };

  if (c.variant != CodebookVariant::Regular) return build(0, 0);
  // Groups tied on projected energy can span the same subspace (for example
  // when L covers whole columns of an N2 = 2 grid); keep the tied group whose
  // quantized report matches the targets best.
  T2R15Pmi best;
  double best_fit = -1;
  for (const auto& [q1, q2] : tied_groups(c.geom, halves, c.L)) {
    T2R15Pmi cand = build(q1, q2);
    double fit = 0;
    for (int s = 0; s < nsb; ++s) {
      const CMat w = reconstruct(c, cand, s);
      for (int l = 0; l < c.rank; ++l) {
        const double t = sb_target[s].col(l).squaredNorm();
        if (t > 0) fit += std::norm(w.col(l).dot(sb_target[s].col(l))) / (t * w.col(l).squaredNorm());
      }
    }
    if (fit > best_fit * (1 + 1e-12)) {
      best_fit = fit;
      best = std::move(cand);
    }
  }
  return best;
}

T2R15Pmi random_pmi(const T2R15Config& c, std::mt19937_64& rng) {
  validate_config(c);
  auto uni = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  T2R15Pmi p;
  if (c.variant == CodebookVariant::Regular) {
    p.q1 = static_cast<int>(uni(0, c.geom.o1 - 1));
    p.q2 = static_cast<int>(uni(0, c.geom.o2 - 1));
    p.i12 = static_cast<u64>(uni(0, static_cast<long long>(binomial(c.geom.n1 * c.geom.n2, c.L)) - 1));
  } else {
    p.i11 = static_cast<int>(uni(0, ps_i11_count(c) - 1));
  }
  T2R15Config one = c;
  one.rank = 1;
  for (int l = 0; l < c.rank; ++l) {
    T2R15Layer layer;
    layer.i13 = static_cast<int>(uni(0, 2 * c.L - 1));
    layer.k1.resize(2 * c.L);
    for (auto& k : layer.k1) k = static_cast<int>(uni(0, 7));
    layer.k1[layer.i13] = 7;
    layer.k2.assign(c.subband_count, std::vector<int>(2 * c.L, 1));
    layer.c.assign(c.subband_count, std::vector<int>(2 * c.L, 0));
    T2R15Pmi probe;
    probe.layers = {layer};
    const auto mask = reporting_mask(one, probe)[0];
    for (int s = 0; s < c.subband_count; ++s)
      for (int i = 0; i < 2 * c.L; ++i) {
        switch (mask[i]) {
          case R15Report::AmpAndPhase:
            layer.k2[s][i] = static_cast<int>(uni(0, 1));
            layer.c[s][i] = static_cast<int>(uni(0, c.n_psk - 1));
            break;
          case R15Report::Phase: layer.c[s][i] = static_cast<int>(uni(0, c.n_psk - 1)); break;
          case R15Report::CoarsePhase: layer.c[s][i] = static_cast<int>(uni(0, 3)); break;
          default: break;
        }
      }
    p.layers.push_back(layer);
  }
  return p;
}

}  // namespace nrcb

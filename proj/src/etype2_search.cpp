#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "nrcb/channel_sim.hpp"
#include "nrcb/quantization.hpp"
#include "nrcb/search_tools.hpp"

namespace nrcb {

namespace {

using Grid = std::vector<std::vector<std::vector<cd>>>;  // [a][b][c]

Grid make_grid(int a, int b, int c) {
  return Grid(a, std::vector<std::vector<cd>>(b, std::vector<cd>(c, 0.0)));
}

struct Spatial {
  std::vector<CVec> basis;
  int q1 = 0, q2 = 0, i11 = 0;
  u64 i12 = 0;
  std::vector<int> ports;
};

std::vector<CVec> split_halves(const std::vector<CMat>& targets) {
  std::vector<CVec> out;
  for (const auto& x : targets) {
    const int half = static_cast<int>(x.rows() / 2);
    for (int l = 0; l < x.cols(); ++l) {
      out.push_back(x.col(l).head(half));
      out.push_back(x.col(l).tail(half));
    }
  }
  return out;
}

Spatial select_regular(const ArrayGeometry& g, int L, const std::vector<CVec>& halves, int q1,
                       int q2) {
  Spatial s;
  s.q1 = q1;
  s.q2 = q2;
  const auto group = orthogonal_group(g, s.q1, s.q2);
  std::vector<int> chosen = omp_select(group, halves, L);
  for (int j = 0; static_cast<int>(chosen.size()) < L; ++j)
    if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) chosen.push_back(j);
  std::vector<int> flat;
  for (int pos : chosen) flat.push_back(pos / g.n2 + g.n1 * (pos % g.n2));
  std::sort(flat.begin(), flat.end());
  s.i12 = encode_combination(flat, g.n1 * g.n2, L);
  for (int k : flat) {
    const auto [n1, n2] = split_beam_index(k, g.n1, g.n2);
    s.basis.push_back(dft_beam(g, g.o1 * n1 + s.q1, g.o2 * n2 + s.q2));
  }
  return s;
}

double port_energy(const std::vector<CVec>& halves, int port) {
  double e = 0;
  for (const auto& x : halves) e += std::norm(x(port));
  return e;
}

Spatial select_consecutive_ports(int p_csirs, int d, int L, const std::vector<CVec>& halves) {
  Spatial s;
  const int half = p_csirs / 2;
  const int count = (p_csirs + 2 * d - 1) / (2 * d);
  double best = -1;
  for (int i11 = 0; i11 < count; ++i11) {
    double e = 0;
    for (int i = 0; i < L; ++i) e += port_energy(halves, (i11 * d + i) % half);
    if (e > best * (1 + 1e-12)) {
      best = e;
      s.i11 = i11;
    }
  }
  for (int i = 0; i < L; ++i) {
    s.ports.push_back((s.i11 * d + i) % half);
    s.basis.push_back(port_selection_basis(p_csirs, s.ports.back()).cast<cd>());
  }
  return s;
}

Spatial select_free_ports(int p_csirs, int L, const std::vector<CVec>& halves) {
  Spatial s;
  const int half = p_csirs / 2;
  std::vector<int> order(half);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> e(half);
  for (int m = 0; m < half; ++m) e[m] = port_energy(halves, m);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return e[a] > e[b]; });
  s.ports.assign(order.begin(), order.begin() + L);
  std::sort(s.ports.begin(), s.ports.end());
  for (int m : s.ports) s.basis.push_back(port_selection_basis(p_csirs, m).cast<cd>());
  return s;
}

// coef[l][i][u]: least-squares combining coefficients of each target.
Grid fit_coefficients(const std::vector<CMat>& targets, const std::vector<CVec>& basis, int rank) {
  const int L = static_cast<int>(basis.size());
  const int half = static_cast<int>(basis[0].size());
  Grid coef = make_grid(rank, 2 * L, static_cast<int>(targets.size()));
  for (size_t u = 0; u < targets.size(); ++u)
    for (int l = 0; l < rank; ++l) {
      const CVec a0 = least_squares(basis, targets[u].col(l).head(half));
      const CVec a1 = least_squares(basis, targets[u].col(l).tail(half));
      for (int i = 0; i < L; ++i) {
        coef[l][i][u] = a0(i);
        coef[l][i + L][u] = a1(i);
      }
    }
  return coef;
}

// Delay/Doppler transform of one coefficient sequence indexed u = iota*n3 + t:
// out[s][n] with c(t, iota) = sum_{s,n} out[s][n] e^{j2pi(tn/n3 + iota s/n4)}.
std::vector<std::vector<cd>> to_delay_doppler(const std::vector<cd>& c, int n3, int n4) {
  std::vector<std::vector<cd>> out(n4, std::vector<cd>(n3, 0.0));
  for (int s = 0; s < n4; ++s)
    for (int n = 0; n < n3; ++n) {
      cd acc = 0.0;
      for (int it = 0; it < n4; ++it)
        for (int t = 0; t < n3; ++t)
          acc += c[it * n3 + t] * std::conj(unit_phase(static_cast<long long>(t) * n, n3) *
                                            unit_phase(static_cast<long long>(it) * s, n4));
      out[s][n] = acc / static_cast<double>(n3 * n4);
    }
  return out;
}

struct Block {
  int qe = 1, rows = 0, cols = 0, L = 0;
  std::vector<cd> v;  // [tau][i][f]
  int strongest = 0;  // flat index
  cd& at(int tau, int i, int f) { return v[(tau * rows + i) * cols + f]; }
};

struct Quantized {
  std::vector<std::vector<std::vector<int>>> bitmap, k2, c;  // [tau][i][f]
  int k1[2] = {15, 15};
};

Quantized quantize_block(const Block& b, int cap) {
  Quantized q;
  q.bitmap.assign(b.qe, std::vector<std::vector<int>>(b.rows, std::vector<int>(b.cols, 0)));
  q.k2 = q.bitmap;
  q.c = q.bitmap;
  const int s_tau = b.strongest / (b.rows * b.cols);
  const int s_i = (b.strongest / b.cols) % b.rows;
  const int s_f = b.strongest % b.cols;
  q.bitmap[s_tau][s_i][s_f] = 1;
  q.k2[s_tau][s_i][s_f] = 7;
  const int pstar = s_i / b.L;
  const cd ref = b.v[b.strongest];
  if (!(std::abs(ref) > 0)) return q;
  std::vector<cd> r(b.v.size());
  double pmax[2] = {0, 0};
  for (size_t x = 0; x < b.v.size(); ++x) {
    r[x] = b.v[x] / ref;
    const int pol = (static_cast<int>(x) / b.cols) % b.rows / b.L;
    pmax[pol] = std::max(pmax[pol], std::abs(r[x]));
  }
  q.k1[pstar] = 15;
  q.k1[1 - pstar] = quantize_r16_wideband(pmax[1 - pstar]);
  std::vector<int> order;
  for (int x = 0; x < static_cast<int>(r.size()); ++x)
    if (x != b.strongest && std::abs(r[x]) > 1e-9) order.push_back(x);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int c) { return std::abs(r[a]) > std::abs(r[c]); });
  const int take = std::min<int>(static_cast<int>(order.size()), cap - 1);
  for (int j = 0; j < take; ++j) {
    const int x = order[j];
    const int tau = x / (b.rows * b.cols), i = (x / b.cols) % b.rows, f = x % b.cols;
    q.bitmap[tau][i][f] = 1;
    q.k2[tau][i][f] = quantize_r16_subband(std::abs(r[x]) / amp_r16_wideband(q.k1[i / b.L]));
    q.c[tau][i][f] = quantize_phase(r[x], 16);
  }
  return q;
}

// Cap for layer li given the per-layer limit and the shared 2*K0 budget.
int layer_cap(int k0, int used, int li, int rank) {
  return std::max(1, std::min(k0, 2 * k0 - used - (rank - 1 - li)));
}

int count_bits(const Quantized& q) {
  int n = 0;
  for (const auto& a : q.bitmap)
    for (const auto& b : a)
      for (int x : b) n += x;
  return n;
}

// Tap choice shared by R16 and R18. energy[l][n] is the delay-domain energy of
// layer l after its strongest tap was moved to 0.
struct TapChoice {
  std::vector<std::vector<int>> taps;
  int m_initial = 0;
};

TapChoice choose_taps(const std::vector<std::vector<double>>& energy, int n3, int mv) {
  TapChoice out;
  auto pick = [&](const std::vector<double>& e, const std::vector<int>& pool, double* score) {
    std::vector<int> p = pool;
    std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return e[a] > e[b]; });
    p.resize(std::min<size_t>(p.size(), mv - 1));
    double s = 0;
    for (int n : p) s += e[n];
    if (score) *score += s;
    p.push_back(0);
    std::sort(p.begin(), p.end());
    return p;
  };
  if (n3 <= 19) {
    std::vector<int> pool;
    for (int n = 1; n < n3; ++n) pool.push_back(n);
    for (const auto& e : energy) out.taps.push_back(pick(e, pool, nullptr));
    return out;
  }
  double best = -1;
  for (int mi = -2 * mv + 1; mi <= 0; ++mi) {
    std::vector<int> pool;
    for (int n = mi; n <= mi + 2 * mv - 1; ++n)
      if (n != 0) pool.push_back(((n % n3) + n3) % n3);
    double score = 0;
    std::vector<std::vector<int>> taps;
    for (const auto& e : energy) taps.push_back(pick(e, pool, &score));
    if (score > best * (1 + 1e-12) + 1e-300) {
      best = score;
      out.taps = taps;
      out.m_initial = mi;
    }
  }
  return out;
}

std::vector<CMat> flatten(const std::vector<std::vector<CMat>>& ch) {
  std::vector<CMat> out;
  for (const auto& row : ch)
    for (const auto& h : row) out.push_back(h);
  return out;
}

int argmax_abs(const std::vector<cd>& v) {
  int best = 0;
  for (int x = 1; x < static_cast<int>(v.size()); ++x)
    if (std::abs(v[x]) > std::abs(v[best]) * (1 + 1e-12)) best = x;
  return best;
}

// Sum over layers of the squared cosine between precoder and target columns.
double target_fit(const CMat& w, const CMat& target) {
  double fit = 0;
  for (int l = 0; l < target.cols(); ++l) {
    const double d = w.col(l).squaredNorm() * target.col(l).squaredNorm();
    if (d > 0) fit += std::norm(w.col(l).dot(target.col(l))) / d;
  }
  return fit;
}

// Groups tied on projected energy can span the same subspace (for example
// when L covers a whole row of the grid); the quantized report decides.
template <class Build>
auto best_of_tied(const ArrayGeometry& g, int L, const std::vector<CVec>& halves, Build&& build) {
  decltype(build(Spatial{}).first) best;
  double best_fit = -1;
  for (const auto& [q1, q2] : tied_groups(g, halves, L)) {
    auto [cand, fit] = build(select_regular(g, L, halves, q1, q2));
    if (fit > best_fit * (1 + 1e-12)) {
      best_fit = fit;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace

namespace {

R16Pmi r16_from_spatial(const R16Config& c, const std::vector<CMat>& targets, const Spatial& sp) {
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int k0 = r16_k0(c);
  const Grid coef = fit_coefficients(targets, sp.basis, c.rank);

  // Delay-domain coefficients with each layer's strongest tap moved to 0.
  std::vector<std::vector<std::vector<cd>>> delay(c.rank);
  std::vector<int> istar(c.rank);
  std::vector<std::vector<double>> energy(c.rank, std::vector<double>(c.n3, 0.0));
  for (int l = 0; l < c.rank; ++l) {
    std::vector<cd> flat;
    std::vector<std::vector<cd>> d(2 * L);
    for (int i = 0; i < 2 * L; ++i) {
      d[i] = to_delay_doppler(coef[l][i], c.n3, 1)[0];
      flat.insert(flat.end(), d[i].begin(), d[i].end());
    }
    const int s = argmax_abs(flat);
    istar[l] = s / c.n3;
    const int nstar = s % c.n3;
    delay[l].assign(2 * L, std::vector<cd>(c.n3));
    for (int i = 0; i < 2 * L; ++i)
      for (int n = 0; n < c.n3; ++n) {
        delay[l][i][n] = d[i][(n + nstar) % c.n3];
        energy[l][n] += std::norm(delay[l][i][n]);
      }
  }
  const TapChoice tc = choose_taps(energy, c.n3, mv);

  R16Pmi p;
  p.q1 = sp.q1;
  p.q2 = sp.q2;
  p.i12 = sp.i12;
  p.i11 = sp.i11;
  if (c.n3 > 19) p.i15 = i15_from_m_initial(tc.m_initial, mv);
  int used = 0;
  for (int l = 0; l < c.rank; ++l) {
    Block b;
    b.rows = 2 * L;
    b.cols = mv;
    b.L = L;
    b.v.assign(2 * L * mv, 0.0);
    for (int i = 0; i < 2 * L; ++i)
      for (int f = 0; f < mv; ++f) b.at(0, i, f) = delay[l][i][tc.taps[l][f]];
    b.strongest = istar[l] * mv;
    const Quantized q = quantize_block(b, layer_cap(k0, used, l, c.rank));
    used += count_bits(q);
    R16Layer out;
    out.i16 = encode_taps(tc.taps[l], c.n3, mv, tc.m_initial);
    out.bitmap = q.bitmap[0];
    out.k2 = q.k2[0];
    out.c = q.c[0];
    out.k1[0] = q.k1[0];
    out.k1[1] = q.k1[1];
    std::vector<int> col(2 * L);
    for (int i = 0; i < 2 * L; ++i) col[i] = out.bitmap[i][0];
    out.i18 = strongest_indicator(col, istar[l], c.rank);
    p.layers.push_back(out);
  }
  return p;
}

}  // namespace

R16Pmi search_r16(const std::vector<CMat>& channels, const R16Config& c) {
  validate_config(c);
  require(static_cast<int>(channels.size()) == c.n3, "search_r16: one channel per frequency unit");
  for (const auto& h : channels) require(h.cols() == c.ports(), "search_r16: channel width must equal P");
  const auto targets = layer_targets(channels, c.rank);
  const auto halves = split_halves(targets);
  if (c.variant != CodebookVariant::Regular)
    return r16_from_spatial(c, targets, select_consecutive_ports(c.p_csirs, c.d, c.L(), halves));
  return best_of_tied(c.geom, c.L(), halves, [&](const Spatial& sp) {
    R16Pmi p = r16_from_spatial(c, targets, sp);
    double fit = 0;
    for (int t = 0; t < c.n3; ++t) fit += target_fit(reconstruct(c, p, t), targets[t]);
    return std::pair{p, fit};
  });
}

R17Pmi search_r17(const std::vector<CMat>& channels, const R17Config& c) {
  validate_config(c);
  require(static_cast<int>(channels.size()) == c.n3, "search_r17: one channel per frequency unit");
  for (const auto& h : channels) require(h.cols() == c.p_csirs, "search_r17: channel width must equal P");
  const int K1 = c.k1(), L = c.L(), M = c.M();
  const int k0 = r17_k0(c);
  const auto targets = layer_targets(channels, c.rank);
  const auto halves = split_halves(targets);
  const Spatial sp = select_free_ports(c.p_csirs, L, halves);
  const Grid coef = fit_coefficients(targets, sp.basis, c.rank);

  R17Pmi p;
  if (L < c.p_csirs / 2) p.i12 = encode_combination(sp.ports, c.p_csirs / 2, L);

  // Candidate tap pairs: offsets o and whether the strongest sits on f = 0 or 1.
  std::vector<int> offsets;
  if (M == 2) {
    if (c.n_threshold == 2) offsets = {1};
    else
      for (int o = 1; o <= 3 && o < c.n3; ++o) offsets.push_back(o);
  }
  std::vector<std::vector<std::vector<cd>>> delay(c.rank);
  std::vector<int> istar(c.rank), nstar(c.rank);
  for (int l = 0; l < c.rank; ++l) {
    std::vector<cd> flat;
    delay[l].resize(K1);
    for (int i = 0; i < K1; ++i) {
      delay[l][i] = to_delay_doppler(coef[l][i], c.n3, 1)[0];
      flat.insert(flat.end(), delay[l][i].begin(), delay[l][i].end());
    }
    const int s = argmax_abs(flat);
    istar[l] = s / c.n3;
    nstar[l] = s % c.n3;
  }
  auto tap_energy = [&](int l, int n) {
    double e = 0;
    for (int i = 0; i < K1; ++i) e += std::norm(delay[l][i][((n % c.n3) + c.n3) % c.n3]);
    return e;
  };
  // The offset is common to all layers; each layer picks its own alignment.
  int best_o = M == 2 ? offsets[0] : 0;
  std::vector<int> best_align(c.rank, 0);
  if (M == 2) {
    double best = -1;
    for (int o : offsets) {
      double score = 0;
      std::vector<int> align(c.rank);
      for (int l = 0; l < c.rank; ++l) {
        const double a = tap_energy(l, nstar[l] + o);
        const double b = tap_energy(l, nstar[l] - o);
        align[l] = b > a * (1 + 1e-12) ? 1 : 0;
        score += std::max(a, b);
      }
      if (score > best * (1 + 1e-12) + 1e-300) {
        best = score;
        best_o = o;
        best_align = align;
      }
    }
    if (c.n_threshold == 4) p.i16 = best_o - 1;
  }
  int used = 0;
  for (int l = 0; l < c.rank; ++l) {
    const int fstar = best_align[l];
    const int base = nstar[l] - (fstar == 1 ? best_o : 0);
    Block b;
    b.rows = K1;
    b.cols = M;
    b.L = L;
    b.v.assign(K1 * M, 0.0);
    for (int i = 0; i < K1; ++i)
      for (int f = 0; f < M; ++f) {
        const int n = base + (f == 0 ? 0 : best_o);
        b.at(0, i, f) = delay[l][i][((n % c.n3) + c.n3) % c.n3];
      }
    b.strongest = istar[l] * M + fstar;
    const Quantized q = quantize_block(b, layer_cap(k0, used, l, c.rank));
    used += count_bits(q);
    R17Layer out;
    out.bitmap = q.bitmap[0];
    out.k2 = q.k2[0];
    out.c = q.c[0];
    out.k1[0] = q.k1[0];
    out.k1[1] = q.k1[1];
    out.i18 = K1 * fstar + istar[l];
    p.layers.push_back(out);
  }
  return p;
}

namespace {

R18Pmi r18_from_spatial(const R18Config& c, const std::vector<CMat>& targets, const Spatial& sp) {
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int qe = c.q_eff();
  const int k0 = r18_k0(c);
  const Grid coef = fit_coefficients(targets, sp.basis, c.rank);

  // dd[l][i][s][n] after moving the strongest (shift, tap) of each layer to (0, 0).
  std::vector<std::vector<std::vector<std::vector<cd>>>> dd(c.rank);
  std::vector<int> istar(c.rank), shift2(c.rank, 0);
  std::vector<std::vector<double>> energy(c.rank, std::vector<double>(c.n3, 0.0));
  for (int l = 0; l < c.rank; ++l) {
    std::vector<std::vector<std::vector<cd>>> raw(2 * L);
    std::vector<cd> flat;
    for (int i = 0; i < 2 * L; ++i) {
      raw[i] = to_delay_doppler(coef[l][i], c.n3, c.n4);
      for (const auto& row : raw[i]) flat.insert(flat.end(), row.begin(), row.end());
    }
    const int s = argmax_abs(flat);
    istar[l] = s / (c.n3 * c.n4);
    const int sstar = (s / c.n3) % c.n4;
    const int nstar = s % c.n3;
    dd[l].assign(2 * L, std::vector<std::vector<cd>>(c.n4, std::vector<cd>(c.n3)));
    for (int i = 0; i < 2 * L; ++i)
      for (int sh = 0; sh < c.n4; ++sh)
        for (int n = 0; n < c.n3; ++n)
          dd[l][i][sh][n] = raw[i][(sh + sstar) % c.n4][(n + nstar) % c.n3];
    if (qe == 2) {
      double best = -1;
      for (int sh = 1; sh < c.n4; ++sh) {
        double e = 0;
        for (int i = 0; i < 2 * L; ++i)
          for (int n = 0; n < c.n3; ++n) e += std::norm(dd[l][i][sh][n]);
        if (e > best * (1 + 1e-12) + 1e-300) {
          best = e;
          shift2[l] = sh;
        }
      }
    }
    for (int i = 0; i < 2 * L; ++i)
      for (int n = 0; n < c.n3; ++n) {
        energy[l][n] += std::norm(dd[l][i][0][n]);
        if (qe == 2) energy[l][n] += std::norm(dd[l][i][shift2[l]][n]);
      }
  }
  const TapChoice tc = choose_taps(energy, c.n3, mv);

  R18Pmi p;
  p.q1 = sp.q1;
  p.q2 = sp.q2;
  p.i12 = sp.i12;
  if (c.n3 > 19) p.i15 = i15_from_m_initial(tc.m_initial, mv);
  int used = 0;
  for (int l = 0; l < c.rank; ++l) {
    const int shifts[2] = {0, shift2[l]};
    Block b;
    b.qe = qe;
    b.rows = 2 * L;
    b.cols = mv;
    b.L = L;
    b.v.assign(qe * 2 * L * mv, 0.0);
    for (int tau = 0; tau < qe; ++tau)
      for (int i = 0; i < 2 * L; ++i)
        for (int f = 0; f < mv; ++f) b.at(tau, i, f) = dd[l][i][shifts[tau]][tc.taps[l][f]];
    b.strongest = istar[l] * mv;
    const Quantized q = quantize_block(b, layer_cap(k0, used, l, c.rank));
    used += count_bits(q);
    R18Layer out;
    out.i16 = encode_taps(tc.taps[l], c.n3, mv, tc.m_initial);
    if (qe == 2) out.i110 = shift2[l] - 1;
    out.bitmap = q.bitmap;
    out.k2 = q.k2;
    out.c = q.c;
    out.k1[0] = q.k1[0];
    out.k1[1] = q.k1[1];
    out.i18 = strongest_indicator(tap0_column(out), istar[l], c.rank);
    p.layers.push_back(out);
  }
  return p;
}

}  // namespace

R18Pmi search_r18(const std::vector<std::vector<CMat>>& channels, const R18Config& c) {
  validate_config(c);
  require(static_cast<int>(channels.size()) == c.n4, "search_r18: one channel row per interval");
  for (const auto& row : channels) {
    require(static_cast<int>(row.size()) == c.n3, "search_r18: one channel per frequency unit");
    for (const auto& h : row) require(h.cols() == c.ports(), "search_r18: channel width must equal P");
  }
  const auto targets = layer_targets(flatten(channels), c.rank);
  const auto halves = split_halves(targets);
  return best_of_tied(c.geom, c.L(), halves, [&](const Spatial& sp) {
    R18Pmi p = r18_from_spatial(c, targets, sp);
    double fit = 0;
    for (int it = 0; it < c.n4; ++it)
      for (int t = 0; t < c.n3; ++t) fit += target_fit(reconstruct(c, p, t, it), targets[it * c.n3 + t]);
    return std::pair{p, fit};
  });
}

}  // namespace nrcb

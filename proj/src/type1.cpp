#include "nrcb/type1.hpp"

#include <cmath>
#include <string>

#include "nrcb/beamforming.hpp"

namespace nrcb {

void validate_config(const Type1Config& cfg) {
  validate_geometry(cfg.geom);
  require(cfg.mode == 1 || cfg.mode == 2, "type1: codebook mode must be 1 or 2");
  require(cfg.rank == 1 || cfg.rank == 2, "type1: rank must be 1 or 2");
  require(cfg.subband_count >= 1, "type1: subband count must be positive");
  if (cfg.mode == 2) require(cfg.geom.n2 > 1, "type1: mode 2 requires N2 > 1");
}

int i13_count(const ArrayGeometry& g) {
  if (g.n1 == 2 && g.n2 == 1) return 2;
  return 4;
}

std::pair<int, int> k_offsets(int i13, const ArrayGeometry& g) {
  if (i13 < 0 || i13 >= i13_count(g))
    throw DomainError("k_offsets: i13=" + std::to_string(i13) + " not valid for this geometry");
  if (i13 == 0) return {0, 0};
  if (i13 == 1) return {g.o1, 0};
  if (g.n2 == 1) {
    // N1 > 2, N2 = 1
    return {i13 * g.o1, 0};
  }
  if (g.n1 == g.n2) return i13 == 2 ? std::pair{0, g.o2} : std::pair{g.o1, g.o2};
  if (g.n1 > g.n2) return i13 == 2 ? std::pair{0, g.o2} : std::pair{2 * g.o1, 0};
  throw DomainError("k_offsets: geometry outside the tabulated regimes");
}

int i11_count(const Type1Config& c) {
  return c.mode == 1 ? c.geom.n1 * c.geom.o1 : c.geom.n1 * c.geom.o1 / 2;
}
int i12_count(const Type1Config& c) {
  return c.mode == 1 ? c.geom.n2 * c.geom.o2 : c.geom.n2 * c.geom.o2 / 2;
}
int i2_count(const Type1Config& c) {
  if (c.mode == 1) return c.rank == 1 ? 4 : 2;
  return c.rank == 1 ? 16 : 8;
}

void validate_pmi(const Type1Config& cfg, const Type1Pmi& p) {
  validate_config(cfg);
  require(p.i11 >= 0 && p.i11 < i11_count(cfg), "type1: i11 out of range");
  require(p.i12 >= 0 && p.i12 < i12_count(cfg), "type1: i12 out of range");
  if (cfg.rank == 2)
    require(p.i13 >= 0 && p.i13 < i13_count(cfg.geom), "type1: i13 out of range");
  else
    require(p.i13 == 0, "type1: i13 is only reported for rank 2");
  require(static_cast<int>(p.i2.size()) == cfg.subband_count,
          "type1: one i2 value per subband is required");
  for (int v : p.i2) require(v >= 0 && v < i2_count(cfg), "type1: i2 out of range");
}

Type1Selection resolve_beam(const Type1Config& cfg, const Type1Pmi& p, int subband) {
  require(subband >= 0 && subband < static_cast<int>(p.i2.size()), "type1: subband out of range");
  const int i2 = p.i2[subband];
  if (cfg.mode == 1) return {p.i11, p.i12, i2};
  const int per_beam = cfg.rank == 1 ? 4 : 2;
  const int sel = i2 / per_beam;
  return {2 * p.i11 + (sel & 1), 2 * p.i12 + (sel >> 1), i2 % per_beam};
}

std::vector<std::pair<int, int>> type1_beams(const Type1Config& cfg, const Type1Pmi& p,
                                             int subband) {
  const auto s = resolve_beam(cfg, p, subband);
  std::vector<std::pair<int, int>> out{{s.l, s.m}};
  if (cfg.rank == 2) {
    const auto [k1, k2] = k_offsets(p.i13, cfg.geom);
    out.emplace_back((s.l + k1) % (cfg.geom.n1 * cfg.geom.o1),
                     (s.m + k2) % (cfg.geom.n2 * cfg.geom.o2));
  }
  return out;
}

CMat build_rank1(const Type1Config& cfg, const Type1Pmi& p, int subband) {
  require(cfg.rank == 1, "build_rank1: configuration is not rank 1");
  validate_pmi(cfg, p);
  const auto s = resolve_beam(cfg, p, subband);
  const CVec v = dft_beam(cfg.geom, s.l, s.m);
  const int half = v.size();
  const cd phi = unit_phase(s.n, 4);
  CMat w(2 * half, 1);
  w.col(0).head(half) = v;
  w.col(0).tail(half) = phi * v;
  return w / std::sqrt(2.0 * half);
}

CMat build_rank2(const Type1Config& cfg, const Type1Pmi& p, int subband) {
  require(cfg.rank == 2, "build_rank2: configuration is not rank 2");
  validate_pmi(cfg, p);
  const auto s = resolve_beam(cfg, p, subband);
  const auto beams = type1_beams(cfg, p, subband);
  const CVec v = dft_beam(cfg.geom, beams[0].first, beams[0].second);
  const CVec vp = dft_beam(cfg.geom, beams[1].first, beams[1].second);
  const int half = v.size();
  const cd phi = unit_phase(s.n, 4);
  CMat w(2 * half, 2);
  w.col(0).head(half) = v;
  w.col(0).tail(half) = phi * v;
  w.col(1).head(half) = vp;
  w.col(1).tail(half) = -phi * vp;
  return w / std::sqrt(4.0 * half);
}

CMat build_type1(const Type1Config& cfg, const Type1Pmi& p, int subband) {
  return cfg.rank == 1 ? build_rank1(cfg, p, subband) : build_rank2(cfg, p, subband);
}

CMat build_type1(const Type1Config& cfg, const Type1Pmi& p, int subband,
                 const Type1Restriction& r) {
  if (!check_rank_restriction(r.ranks, cfg.rank))
    throw RestrictionError("type1: rank " + std::to_string(cfg.rank) + " is restricted");
  if (!r.beams.empty() && !check_beam_restriction(r.beams, cfg, p))
    throw RestrictionError("type1: selected beam is restricted");
  return build_type1(cfg, p, subband);
}

bool check_beam_restriction(const std::vector<bool>& bits, const Type1Config& cfg,
                            const Type1Pmi& p) {
  const int grid_v = cfg.geom.n2 * cfg.geom.o2;
  const size_t need = static_cast<size_t>(cfg.geom.n1 * cfg.geom.o1) * grid_v;
  if (bits.size() != need)
    throw FormatError("check_beam_restriction: bitmap must hold N1O1*N2O2 bits");
  for (int sb = 0; sb < static_cast<int>(p.i2.size()); ++sb)
    for (const auto& [l, m] : type1_beams(cfg, p, sb))
      if (!bits[static_cast<size_t>(grid_v) * l + m]) return false;
  return true;
}

bool check_rank_restriction(const std::bitset<8>& r, int rank) {
  if (rank < 1 || rank > 8) throw DomainError("check_rank_restriction: rank outside 1..8");
  return r.test(rank - 1);
}

Type1Pmi search_type1(const std::vector<CMat>& channels, const Type1Config& cfg,
                      const Type1Restriction& restriction, double noise_var) {
  validate_config(cfg);
  if (channels.empty()) throw DegenerateError("search_type1: no channel matrices");
  double energy = 0;
  for (const auto& h : channels) {
    require(h.cols() == cfg.geom.ports(), "search_type1: channel column count must equal P");
    energy += h.squaredNorm();
  }
  if (!(energy > 0)) throw DegenerateError("search_type1: zero channel");
  if (!check_rank_restriction(restriction.ranks, cfg.rank))
    throw RestrictionError("search_type1: configured rank is restricted");

  const int nsb = cfg.subband_count;
  const int nch = static_cast<int>(channels.size());
  const int n13 = cfg.rank == 2 ? i13_count(cfg.geom) : 1;
  const int n2 = i2_count(cfg);
  const int grid_v = cfg.geom.n2 * cfg.geom.o2;

  Type1Pmi best;
  double best_rate = -1;
  bool found = false;
  Type1Pmi cand;
  cand.i2.assign(nsb, 0);
  for (int i11 = 0; i11 < i11_count(cfg); ++i11) {
    for (int i12 = 0; i12 < i12_count(cfg); ++i12) {
      for (int i13 = 0; i13 < n13; ++i13) {
        cand.i11 = i11;
        cand.i12 = i12;
        cand.i13 = i13;
        double total = 0;
        bool ok = true;
        for (int sb = 0; sb < nsb && ok; ++sb) {
          double sb_best = -1;
          int sb_arg = -1;
          for (int i2 = 0; i2 < n2; ++i2) {
            cand.i2[sb] = i2;
            if (!restriction.beams.empty()) {
              bool allowed = true;
              for (const auto& [l, m] : type1_beams(cfg, cand, sb))
                if (!restriction.beams.at(static_cast<size_t>(grid_v) * l + m)) allowed = false;
              if (!allowed) continue;
            }
            const CMat w = build_type1(cfg, cand, sb);
            double r = 0;
            for (int m = 0; m < nch; ++m)
              if (m * nsb / nch == sb) r += su_rate(channels[m], w, noise_var);
            if (r > sb_best + 1e-12 * std::abs(sb_best)) {
              sb_best = r;
              sb_arg = i2;
            }
          }
          if (sb_arg < 0) {
            ok = false;
            break;
          }
          cand.i2[sb] = sb_arg;
          total += sb_best;
        }
        if (!ok) continue;
        if (!found || total > best_rate + 1e-12 * std::abs(best_rate)) {
          best = cand;
          best_rate = total;
          found = true;
        }
      }
    }
  }
  if (!found) throw RestrictionError("search_type1: every PMI is restricted");
  return best;
}

Type1Pmi random_pmi(const Type1Config& cfg, std::mt19937_64& rng) {
  validate_config(cfg);
  auto uni = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  Type1Pmi p;
  p.i11 = uni(i11_count(cfg));
  p.i12 = uni(i12_count(cfg));
  p.i13 = cfg.rank == 2 ? uni(i13_count(cfg.geom)) : 0;
  for (int s = 0; s < cfg.subband_count; ++s) p.i2.push_back(uni(i2_count(cfg)));
  return p;
}

}  // namespace nrcb

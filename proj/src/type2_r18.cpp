#include "nrcb/type2_r18.hpp"

#include <algorithm>
#include <cmath>

#include "nrcb/quantization.hpp"

namespace nrcb {

const R16Params& r18_params(int combination) {
  static const R16Params table[9] = {
      {2, {1, 8}, {1, 16}, {1, 4}}, {2, {1, 4}, {1, 8}, {1, 2}}, {4, {1, 4}, {1, 8}, {1, 4}},
      {4, {1, 4}, {1, 4}, {1, 4}},  {4, {1, 4}, {1, 4}, {1, 2}}, {4, {1, 4}, {1, 4}, {3, 4}},
      {4, {1, 2}, {1, 4}, {1, 2}},  {6, {1, 4}, {0, 1}, {1, 2}}, {6, {1, 4}, {0, 1}, {3, 4}},
  };
  require(combination >= 1 && combination <= 9, "paramCombination-Doppler must lie in 1..9");
  return table[combination - 1];
}

R16Config r16_view(const R18Config& c) {
  R16Config v;
  v.variant = CodebookVariant::Regular;
  v.geom = c.geom;
  v.r = c.r;
  v.n3 = c.n3;
  v.rank = c.rank;
  return v;
}

int compute_mv(const R18Config& c, int rank) {
  const R16Params& p = r18_params(c.param_combination);
  require(rank >= 1 && rank <= 4, "compute_mv: rank must lie in 1..4");
  const Ratio pv = rank <= 2 ? p.pv_low : p.pv_high;
  require(pv.num > 0, "paramCombination-Doppler " + std::to_string(c.param_combination) +
                          " does not allow rank " + std::to_string(rank));
  return ceil_ratio(pv, c.n3, c.r);
}

int r18_k0(const R18Config& c) {
  const R16Params& p = r18_params(c.param_combination);
  return ceil_ratio(p.beta, 2LL * p.L * compute_mv(c, 1) * c.q_eff());
}

bool check_ri_restriction(unsigned bits, int rank) {
  require(rank >= 1 && rank <= 4, "rank must lie in 1..4");
  return (bits >> (rank - 1)) & 1u;
}

void validate_config(const R18Config& c) {
  const R16Params& p = r18_params(c.param_combination);
  validate_geometry(c.geom);
  require(p.L <= c.geom.n1 * c.geom.n2, "R18: L exceeds N1*N2");
  require(c.r == 1 || c.r == 2, "R18: R must be 1 or 2");
  require(c.n3 >= 3 && c.n3 <= 36 && c.n3 % c.r == 0, "R18: n3 must lie in 3..36 and be a multiple of R");
  require(c.n4 == 1 || c.n4 == 2 || c.n4 == 4 || c.n4 == 8, "R18: n4 must be 1, 2, 4 or 8");
  require(c.d_slots >= 1, "R18: slots per interval must be positive");
  require(c.ri_restriction <= 0xF, "R18: RI restriction holds four bits");
  compute_mv(c, c.rank);
  if (!check_ri_restriction(c.ri_restriction, c.rank))
    throw RestrictionError("R18: rank " + std::to_string(c.rank) + " is barred by RI restriction");
}

std::vector<int> decode_shifts(std::optional<int> i110, int n4) {
  if (n4 == 1) {
    if (i110) throw FormatError("R18: i110 is not reported when n4 = 1");
    return {0};
  }
  if (!i110) throw FormatError("R18: i110 is required when n4 > 1");
  if (*i110 < 0 || *i110 > n4 - 2) throw FormatError("R18: i110 must lie in 0..n4-2");
  return {0, *i110 + 1};
}

std::vector<int> tap0_column(const R18Layer& l) {
  std::vector<int> col;
  for (const auto& block : l.bitmap)
    for (const auto& row : block) col.push_back(row.at(0));
  return col;
}

std::optional<std::string> validate_budget(const R18Pmi& p, const R18Config& c) {
  const int k0 = r18_k0(c);
  int total = 0;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    int knz = 0;
    for (const auto& block : p.layers[l].bitmap)
      for (const auto& row : block)
        for (int b : row) knz += b;
    if (knz > k0)
      return "layer " + std::to_string(l) + " reports " + std::to_string(knz) +
             " coefficients, above K0 = " + std::to_string(k0);
    total += knz;
  }
  if (total > 2 * k0)
    return "total nonzero count " + std::to_string(total) + " exceeds 2K0 = " + std::to_string(2 * k0);
  return std::nullopt;
}

std::vector<std::vector<int>> decode_taps(const R18Pmi& p, const R18Config& c) {
  const int mv = compute_mv(c, c.rank);
  int mi = 0;
  if (c.n3 > 19) {
    if (!p.i15) throw FormatError("i15 is required when n3 > 19");
    mi = m_initial_from_i15(*p.i15, mv);
  } else if (p.i15) {
    throw FormatError("i15 is not reported when n3 <= 19");
  }
  std::vector<std::vector<int>> out;
  for (const auto& l : p.layers) out.push_back(decode_taps(l.i16, c.n3, mv, mi));
  return out;
}

void validate_pmi(const R18Config& c, const R18Pmi& p) {
  validate_config(c);
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int qe = c.q_eff();
  if (static_cast<int>(p.layers.size()) != c.rank)
    throw FormatError("R18: layer count must equal the rank");
  require(p.q1 >= 0 && p.q1 < c.geom.o1 && p.q2 >= 0 && p.q2 < c.geom.o2, "R18: (q1,q2) out of range");
  if (p.i12 >= binomial(c.geom.n1 * c.geom.n2, L)) throw FormatError("R18: i12 out of range");
  decode_taps(p, c);
  for (const auto& l : p.layers) {
    decode_shifts(l.i110, c.n4);
    if (static_cast<int>(l.bitmap.size()) != qe || static_cast<int>(l.k2.size()) != qe ||
        static_cast<int>(l.c.size()) != qe)
      throw FormatError("R18: one coefficient block per shift is required");
    for (int tau = 0; tau < qe; ++tau)
      check_coefficients(l.bitmap[tau], l.k2[tau], l.c[tau], 2 * L, mv, "R18");
    const int flat = strongest_from_indicator(tap0_column(l), l.i18, c.rank);
    const int tau = flat / (2 * L), istar = flat % (2 * L);
    for (int k : l.k1) require(k >= 1 && k <= 15, "R18: wideband amplitude index must lie in 1..15");
    if (l.k1[istar / L] != 15 || !l.bitmap[tau][istar][0] || l.k2[tau][istar][0] != 7 ||
        l.c[tau][istar][0] != 0)
      throw ConsistencyError("R18: strongest coefficient must hold k1 = 15, k2 = 7, c = 0, bitmap = 1");
  }
  if (auto v = validate_budget(p, c)) throw ConsistencyError("R18: " + *v);
}

cd r18_coefficient(const R18Layer& l, int L, int tau, int i, int f) {
  if (!l.bitmap[tau][i][f]) return 0.0;
  return amp_r16_wideband(l.k1[i / L]) * amp_r16_subband(l.k2[tau][i][f]) * phase(l.c[tau][i][f], 16);
}

CMat reconstruct(const R18Config& c, const R18Pmi& p, int t, int iota) {
  validate_pmi(c, p);
  require(t >= 0 && t < c.n3, "R18: frequency index out of range");
  require(iota >= 0 && iota < c.n4, "R18: interval index out of range");
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int qe = c.q_eff();
  T2R15Config beam_cfg;
  beam_cfg.geom = c.geom;
  beam_cfg.L = L;
  T2R15Pmi beams;
  beams.q1 = p.q1;
  beams.q2 = p.q2;
  beams.i12 = p.i12;
  const auto basis = r15_basis(beam_cfg, beams);
  const double energy = basis[0].squaredNorm();
  const auto taps = decode_taps(p, c);
  CMat w(c.ports(), c.rank);
  for (int li = 0; li < c.rank; ++li) {
    const auto& l = p.layers[li];
    const auto shifts = decode_shifts(l.i110, c.n4);
    std::vector<cd> a(2 * L, 0.0);
    for (int tau = 0; tau < qe; ++tau) {
      const cd z = unit_phase(static_cast<long long>(iota) * shifts[tau], c.n4);
      for (int i = 0; i < 2 * L; ++i)
        for (int f = 0; f < mv; ++f)
          a[i] += r18_coefficient(l, L, tau, i, f) *
                  unit_phase(static_cast<long long>(t) * taps[li][f], c.n3) * z;
    }
    w.col(li) = combine_beams(basis, a, energy);
  }
  return w / std::sqrt(static_cast<double>(c.rank));
}

R18Pmi random_pmi(const R18Config& c, std::mt19937_64& rng) {
  validate_config(c);
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int qe = c.q_eff();
  const int k0 = r18_k0(c);
  auto uni = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  R18Pmi p;
  p.q1 = static_cast<int>(uni(0, c.geom.o1 - 1));
  p.q2 = static_cast<int>(uni(0, c.geom.o2 - 1));
  p.i12 = static_cast<u64>(uni(0, static_cast<long long>(binomial(c.geom.n1 * c.geom.n2, L)) - 1));
  if (c.n3 > 19) p.i15 = static_cast<int>(uni(0, 2 * mv - 1));
  const u64 ntap = tap_combination_count(c.n3, mv);
  const int cells_per_layer = qe * 2 * L * mv;
  int budget = 2 * k0;
  for (int li = 0; li < c.rank; ++li) {
    R18Layer l;
    l.i16 = static_cast<u64>(uni(0, static_cast<long long>(ntap) - 1));
    if (c.n4 > 1) l.i110 = static_cast<int>(uni(0, c.n4 - 2));
    l.bitmap.assign(qe, std::vector<std::vector<int>>(2 * L, std::vector<int>(mv, 0)));
    l.k2 = l.bitmap;
    l.c = l.bitmap;
    const int flat = static_cast<int>(uni(0, qe * 2 * L - 1));
    const int tstar = flat / (2 * L), istar = flat % (2 * L);
    const int cap = std::min(k0, budget - (c.rank - 1 - li));
    const int count = static_cast<int>(uni(1, cap));
    std::vector<int> cells;
    for (int x = 0; x < cells_per_layer; ++x)
      if (x != flat * mv) cells.push_back(x);
    std::shuffle(cells.begin(), cells.end(), rng);
    l.bitmap[tstar][istar][0] = 1;
    l.k2[tstar][istar][0] = 7;
    for (int j = 0; j < count - 1; ++j) {
      const int tau = cells[j] / (2 * L * mv);
      const int i = (cells[j] / mv) % (2 * L);
      const int f = cells[j] % mv;
      l.bitmap[tau][i][f] = 1;
      l.k2[tau][i][f] = static_cast<int>(uni(0, 7));
      l.c[tau][i][f] = static_cast<int>(uni(0, 15));
    }
    budget -= count;
    l.k1[istar / L] = 15;
    l.k1[1 - istar / L] = static_cast<int>(uni(1, 15));
    l.i18 = strongest_indicator(tap0_column(l), flat, c.rank);
    p.layers.push_back(l);
  }
  return p;
}

R18Pmi embed_r16(const R16Pmi& s) {
  R18Pmi p;
  p.q1 = s.q1;
  p.q2 = s.q2;
  p.i12 = s.i12;
  p.i15 = s.i15;
  for (const auto& l : s.layers) {
    R18Layer o;
    o.i16 = l.i16;
    o.bitmap = {l.bitmap};
    o.k2 = {l.k2};
    o.c = {l.c};
    o.i18 = l.i18;
    o.k1[0] = l.k1[0];
    o.k1[1] = l.k1[1];
    p.layers.push_back(o);
  }
  return p;
}

}  // namespace nrcb

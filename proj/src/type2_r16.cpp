#include "nrcb/type2_r16.hpp"

#include <algorithm>
#include <cmath>

#include "nrcb/quantization.hpp"

namespace nrcb {

int ceil_ratio(Ratio r, long long n, long long div) {
  const long long num = static_cast<long long>(r.num) * n;
  const long long den = static_cast<long long>(r.den) * div;
  return static_cast<int>((num + den - 1) / den);
}

const R16Params& r16_params(int combination) {
  static const R16Params table[8] = {
      {2, {1, 4}, {1, 8}, {1, 4}}, {2, {1, 4}, {1, 8}, {1, 2}}, {4, {1, 4}, {1, 8}, {1, 4}},
      {4, {1, 4}, {1, 8}, {1, 2}}, {4, {1, 4}, {1, 4}, {3, 4}}, {4, {1, 2}, {1, 4}, {1, 2}},
      {6, {1, 4}, {0, 1}, {1, 2}}, {6, {1, 4}, {0, 1}, {3, 4}},
  };
  require(combination >= 1 && combination <= 8, "paramCombination must lie in 1..8");
  return table[combination - 1];
}

int derive_n3(int bwp_rbs, int subband_size, int r) {
  require(r == 1 || r == 2, "derive_n3: R must be 1 or 2");
  bool ok = false;
  if (bwp_rbs >= 24 && bwp_rbs <= 72) ok = subband_size == 4 || subband_size == 8;
  else if (bwp_rbs >= 73 && bwp_rbs <= 144) ok = subband_size == 8 || subband_size == 16;
  else if (bwp_rbs >= 145 && bwp_rbs <= 275) ok = subband_size == 16 || subband_size == 32;
  require(ok, "derive_n3: subband size " + std::to_string(subband_size) +
                  " is not configurable for a BWP of " + std::to_string(bwp_rbs) + " RBs");
  return r * ((bwp_rbs + subband_size - 1) / subband_size);
}

int compute_mv(const R16Config& c, int rank) {
  const R16Params& p = r16_params(c.param_combination);
  require(rank >= 1 && rank <= 4, "compute_mv: rank must lie in 1..4");
  const Ratio pv = rank <= 2 ? p.pv_low : p.pv_high;
  require(pv.num > 0, "paramCombination " + std::to_string(c.param_combination) +
                          " does not allow rank " + std::to_string(rank));
  return ceil_ratio(pv, c.n3, c.r);
}

int r16_k0(const R16Config& c) {
  const R16Params& p = r16_params(c.param_combination);
  return ceil_ratio(p.beta, 2LL * p.L * compute_mv(c, 1));
}

void validate_config(const R16Config& c) {
  const R16Params& p = r16_params(c.param_combination);
  require(c.r == 1 || c.r == 2, "R16: R must be 1 or 2");
  require(c.n3 >= 3 && c.n3 <= 36 && c.n3 % c.r == 0, "R16: n3 must lie in 3..36 and be a multiple of R");
  require(c.rank >= 1 && c.rank <= 4, "R16: rank must lie in 1..4");
  compute_mv(c, c.rank);
  if (c.variant == CodebookVariant::Regular) {
    validate_geometry(c.geom);
    require(p.L <= c.geom.n1 * c.geom.n2, "R16: L exceeds N1*N2");
  } else {
    require(is_valid_port_count(c.p_csirs), "R16: invalid CSI-RS port count");
    require(p.L <= c.p_csirs / 2, "R16: L exceeds P/2");
    require(c.d >= 1 && c.d <= 4 && c.d <= std::min(c.p_csirs / 2, p.L),
            "R16: d must satisfy 1 <= d <= min(P/2, L, 4)");
  }
}

u64 tap_combination_count(int n3, int mv) {
  return n3 <= 19 ? binomial(n3 - 1, mv - 1) : binomial(2 * mv - 1, mv - 1);
}

int m_initial_from_i15(int i15, int mv) {
  require(i15 >= 0 && i15 < 2 * mv, "i15 must lie in 0..2Mv-1");
  return i15 == 0 ? 0 : i15 - 2 * mv;
}

int i15_from_m_initial(int m_initial, int mv) {
  require(m_initial <= 0 && m_initial > -2 * mv, "M_initial must lie in -2Mv+1..0");
  return m_initial == 0 ? 0 : m_initial + 2 * mv;
}

std::vector<int> decode_taps(u64 i16, int n3, int mv, int m_initial) {
  require(mv >= 1 && mv <= n3, "decode_taps: Mv out of range");
  if (i16 >= tap_combination_count(n3, mv))
    throw FormatError("i16 = " + std::to_string(i16) + " exceeds the tap combination count");
  std::vector<int> taps{0};
  if (mv == 1) return taps;
  if (n3 <= 19) {
    for (int s : decode_combination(i16, n3 - 1, mv - 1)) taps.push_back(s + 1);
    return taps;
  }
  for (int s : decode_combination(i16, 2 * mv - 1, mv - 1)) {
    const int n = s + 1;
    taps.push_back(n <= m_initial + 2 * mv - 1 ? n : n + (n3 - 2 * mv));
  }
  return taps;
}

u64 encode_taps(const std::vector<int>& taps, int n3, int mv, int m_initial) {
  require(static_cast<int>(taps.size()) == mv && !taps.empty() && taps[0] == 0,
          "encode_taps: expected Mv taps starting with 0");
  std::vector<int> subset;
  for (int f = 1; f < mv; ++f) {
    int n = taps[f];
    if (n3 > 19) {
      const int upper = m_initial + 2 * mv - 1;
      if (n > upper) n -= n3 - 2 * mv;
      require(n >= 1 && n <= 2 * mv - 1, "encode_taps: tap outside the window of 2Mv taps");
    }
    subset.push_back(n - 1);
  }
  const u64 idx = n3 <= 19 ? encode_combination(subset, n3 - 1, mv - 1)
                           : encode_combination(subset, 2 * mv - 1, mv - 1);
  if (decode_taps(idx, n3, mv, m_initial) != taps)
    throw DomainError("encode_taps: taps are not representable with this window");
  return idx;
}

std::vector<std::vector<int>> decode_taps(const R16Pmi& p, const R16Config& c) {
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

std::vector<int> remap_taps(const std::vector<int>& taps, int strongest, int n3) {
  require(strongest >= 0 && strongest < static_cast<int>(taps.size()), "remap_taps: bad strongest");
  std::vector<int> out;
  for (int n : taps) out.push_back(((n - taps[strongest]) % n3 + n3) % n3);
  return out;
}

int strongest_indicator(const std::vector<int>& col, int i_star, int rank) {
  require(i_star >= 0 && i_star < static_cast<int>(col.size()), "strongest index out of range");
  if (rank > 1) return i_star;
  if (!col[i_star]) throw ConsistencyError("strongest coefficient is absent from the bitmap");
  int count = 0;
  for (int i = 0; i <= i_star; ++i) count += col[i];
  return count - 1;
}

int strongest_from_indicator(const std::vector<int>& col, int i18, int rank) {
  const int n = static_cast<int>(col.size());
  if (rank > 1) {
    if (i18 < 0 || i18 >= n) throw FormatError("i18 out of range");
    return i18;
  }
  int count = -1;
  for (int i = 0; i < n; ++i) {
    count += col[i];
    if (col[i] && count == i18) return i;
  }
  throw FormatError("i18 = " + std::to_string(i18) + " exceeds the tap-0 bitmap weight");
}

std::optional<std::string> validate_budget(const R16Pmi& p, const R16Config& c) {
  const int k0 = r16_k0(c);
  int total = 0;
  for (size_t l = 0; l < p.layers.size(); ++l) {
    int knz = 0;
    for (const auto& row : p.layers[l].bitmap)
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

void check_coefficients(const std::vector<std::vector<int>>& bitmap,
                        const std::vector<std::vector<int>>& k2,
                        const std::vector<std::vector<int>>& c, int rows, int cols,
                        const char* who) {
  const std::string w(who);
  if (static_cast<int>(bitmap.size()) != rows || static_cast<int>(k2.size()) != rows ||
      static_cast<int>(c.size()) != rows)
    throw FormatError(w + ": coefficient blocks must hold 2L rows");
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(bitmap[i].size()) != cols || static_cast<int>(k2[i].size()) != cols ||
        static_cast<int>(c[i].size()) != cols)
      throw FormatError(w + ": coefficient rows must hold one entry per tap");
    for (int f = 0; f < cols; ++f) {
      if (bitmap[i][f] != 0 && bitmap[i][f] != 1) throw FormatError(w + ": bitmap entries are bits");
      if (bitmap[i][f]) {
        require(k2[i][f] >= 0 && k2[i][f] <= 7, w + ": subband amplitude index out of range");
        require(c[i][f] >= 0 && c[i][f] <= 15, w + ": phase index out of range");
      } else if (k2[i][f] != 0 || c[i][f] != 0) {
        throw ConsistencyError(w + ": coefficient outside the bitmap carries nonzero indices");
      }
    }
  }
}

namespace {

int ps_i11_count(const R16Config& c) { return (c.p_csirs + 2 * c.d - 1) / (2 * c.d); }

}  // namespace

void validate_pmi(const R16Config& c, const R16Pmi& p) {
  validate_config(c);
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  if (static_cast<int>(p.layers.size()) != c.rank)
    throw FormatError("R16: layer count must equal the rank");
  if (c.variant == CodebookVariant::Regular) {
    require(p.q1 >= 0 && p.q1 < c.geom.o1 && p.q2 >= 0 && p.q2 < c.geom.o2, "R16: (q1,q2) out of range");
    if (p.i12 >= binomial(c.geom.n1 * c.geom.n2, L)) throw FormatError("R16: i12 out of range");
  } else {
    require(p.i11 >= 0 && p.i11 < ps_i11_count(c), "R16: port-selection i11 out of range");
  }
  decode_taps(p, c);
  for (const auto& l : p.layers) {
    check_coefficients(l.bitmap, l.k2, l.c, 2 * L, mv, "R16");
    std::vector<int> col(2 * L);
    for (int i = 0; i < 2 * L; ++i) col[i] = l.bitmap[i][0];
    const int istar = strongest_from_indicator(col, l.i18, c.rank);
    for (int k : l.k1) require(k >= 1 && k <= 15, "R16: wideband amplitude index must lie in 1..15");
    if (l.k1[istar / L] != 15 || !l.bitmap[istar][0] || l.k2[istar][0] != 7 || l.c[istar][0] != 0)
      throw ConsistencyError("R16: strongest coefficient must hold k1 = 15, k2 = 7, c = 0, bitmap = 1");
  }
  if (auto v = validate_budget(p, c)) throw ConsistencyError("R16: " + *v);
}

std::vector<CVec> r16_basis(const R16Config& c, const R16Pmi& p) {
  T2R15Config r15;
  r15.variant = c.variant;
  r15.geom = c.geom;
  r15.p_csirs = c.p_csirs;
  r15.d = c.d;
  r15.L = c.L();
  T2R15Pmi q;
  q.q1 = p.q1;
  q.q2 = p.q2;
  q.i12 = p.i12;
  q.i11 = p.i11;
  return r15_basis(r15, q);
}

cd r16_coefficient(const R16Layer& l, int L, int i, int f) {
  if (!l.bitmap[i][f]) return 0.0;
  return amp_r16_wideband(l.k1[i / L]) * amp_r16_subband(l.k2[i][f]) * phase(l.c[i][f], 16);
}

CMat reconstruct(const R16Config& c, const R16Pmi& p, int t) {
  validate_pmi(c, p);
  require(t >= 0 && t < c.n3, "R16: frequency index out of range");
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const auto basis = r16_basis(c, p);
  const double energy = basis[0].squaredNorm();
  const auto taps = decode_taps(p, c);
  CMat w(c.ports(), c.rank);
  for (int li = 0; li < c.rank; ++li) {
    std::vector<cd> a(2 * L, 0.0);
    for (int i = 0; i < 2 * L; ++i)
      for (int f = 0; f < mv; ++f)
        a[i] += r16_coefficient(p.layers[li], L, i, f) * unit_phase(static_cast<long long>(t) * taps[li][f], c.n3);
    w.col(li) = combine_beams(basis, a, energy);
  }
  return w / std::sqrt(static_cast<double>(c.rank));
}

R16Pmi random_pmi(const R16Config& c, std::mt19937_64& rng) {
  validate_config(c);
  const int L = c.L();
  const int mv = compute_mv(c, c.rank);
  const int k0 = r16_k0(c);
  auto uni = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  R16Pmi p;
  if (c.variant == CodebookVariant::Regular) {
    p.q1 = static_cast<int>(uni(0, c.geom.o1 - 1));
    p.q2 = static_cast<int>(uni(0, c.geom.o2 - 1));
    p.i12 = static_cast<u64>(uni(0, static_cast<long long>(binomial(c.geom.n1 * c.geom.n2, L)) - 1));
  } else {
    p.i11 = static_cast<int>(uni(0, ps_i11_count(c) - 1));
  }
  if (c.n3 > 19) p.i15 = static_cast<int>(uni(0, 2 * mv - 1));
  const u64 ntap = tap_combination_count(c.n3, mv);
  int budget = 2 * k0;
  for (int li = 0; li < c.rank; ++li) {
    R16Layer l;
    l.i16 = static_cast<u64>(uni(0, static_cast<long long>(ntap) - 1));
    l.bitmap.assign(2 * L, std::vector<int>(mv, 0));
    l.k2 = l.bitmap;
    l.c = l.bitmap;
    const int istar = static_cast<int>(uni(0, 2 * L - 1));
    // Remaining layers each need room for their strongest coefficient.
    const int cap = std::min(k0, budget - (c.rank - 1 - li));
    const int count = static_cast<int>(uni(1, cap));
    std::vector<int> cells;
    for (int x = 0; x < 2 * L * mv; ++x)
      if (x != istar * mv) cells.push_back(x);
    std::shuffle(cells.begin(), cells.end(), rng);
    l.bitmap[istar][0] = 1;
    l.k2[istar][0] = 7;
    for (int j = 0; j < count - 1; ++j) {
      const int i = cells[j] / mv, f = cells[j] % mv;
      l.bitmap[i][f] = 1;
      l.k2[i][f] = static_cast<int>(uni(0, 7));
      l.c[i][f] = static_cast<int>(uni(0, 15));
    }
    budget -= count;
    l.k1[istar / L] = 15;
    l.k1[1 - istar / L] = static_cast<int>(uni(1, 15));
    std::vector<int> col(2 * L);
    for (int i = 0; i < 2 * L; ++i) col[i] = l.bitmap[i][0];
    l.i18 = strongest_indicator(col, istar, c.rank);
    p.layers.push_back(l);
  }
  return p;
}

}  // namespace nrcb

#include "nrcb/type2_r17.hpp"

#include <algorithm>
#include <cmath>

#include "nrcb/quantization.hpp"

namespace nrcb {

const R17Params& r17_params(int combination) {
  static const R17Params table[8] = {
      {1, {3, 4}, {1, 2}}, {1, {1, 1}, {1, 2}}, {1, {1, 1}, {3, 4}}, {1, {1, 1}, {1, 1}},
      {2, {1, 2}, {1, 2}}, {2, {3, 4}, {1, 2}}, {2, {1, 1}, {1, 2}}, {2, {1, 1}, {3, 4}},
  };
  require(combination >= 1 && combination <= 8, "paraCombination must lie in 1..8");
  return table[combination - 1];
}

int R17Config::k1() const {
  const Ratio a = r17_params(param_combination).alpha;
  return (a.num * p_csirs) / a.den;
}

void validate_config(const R17Config& c) {
  const R17Params& p = r17_params(c.param_combination);
  require(is_valid_port_count(c.p_csirs), "R17: invalid CSI-RS port count");
  require((p.alpha.num * c.p_csirs) % p.alpha.den == 0 && c.k1() % 2 == 0 && c.k1() > 0,
          "R17: K1 = alpha * P must be an even positive integer");
  require(c.n_threshold == 2 || c.n_threshold == 4, "R17: N must be 2 or 4");
  require(c.rank >= 1 && c.rank <= 4, "R17: rank must lie in 1..4");
  require(c.n3 >= (p.M == 1 ? 1 : c.n_threshold), "R17: n3 too small for the tap window");
}

int r17_k0(const R17Config& c) {
  const R17Params& p = r17_params(c.param_combination);
  return ceil_ratio(p.beta, static_cast<long long>(c.k1()) * p.M);
}

std::vector<int> decode_ports(std::optional<u64> i12, const R17Config& c) {
  validate_config(c);
  const int half = c.p_csirs / 2;
  const int L = c.L();
  if (L == half) {
    if (i12) throw FormatError("R17: i12 is not reported when alpha = 1");
    std::vector<int> out(L);
    for (int i = 0; i < L; ++i) out[i] = i;
    return out;
  }
  if (!i12) throw FormatError("R17: i12 is required when alpha < 1");
  if (*i12 >= binomial(half, L)) throw FormatError("R17: i12 out of range");
  return decode_combination(*i12, half, L);
}

u64 encode_ports(const std::vector<int>& ports, const R17Config& c) {
  return encode_combination(ports, c.p_csirs / 2, c.L());
}

std::vector<int> decode_tap_offset(std::optional<int> i16, const R17Config& c) {
  const int M = c.M();
  const bool reported = M == 2 && c.n_threshold == 4;
  if (!reported) {
    if (i16) throw FormatError("R17: i16 is not reported for this configuration");
    return M == 1 ? std::vector<int>{0} : std::vector<int>{0, 1};
  }
  if (!i16) throw FormatError("R17: i16 is required when M = 2 and N = 4");
  if (*i16 < 0 || *i16 > 2) throw FormatError("R17: i16 must lie in 0..2");
  return {0, *i16 + 1};
}

std::optional<std::string> validate_budget(const R17Pmi& p, const R17Config& c) {
  const int k0 = r17_k0(c);
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

void validate_pmi(const R17Config& c, const R17Pmi& p) {
  validate_config(c);
  if (static_cast<int>(p.layers.size()) != c.rank)
    throw FormatError("R17: layer count must equal the rank");
  decode_ports(p.i12, c);
  const auto taps = decode_tap_offset(p.i16, c);
  require(taps.back() < c.n3, "R17: tap index exceeds n3");
  const int K1 = c.k1(), L = c.L(), M = c.M();
  for (const auto& l : p.layers) {
    check_coefficients(l.bitmap, l.k2, l.c, K1, M, "R17");
    if (l.i18 < 0 || l.i18 >= K1 * M) throw FormatError("R17: i18 out of range");
    const int fstar = l.i18 / K1, istar = l.i18 % K1;
    for (int k : l.k1) require(k >= 1 && k <= 15, "R17: wideband amplitude index must lie in 1..15");
    if (l.k1[istar / L] != 15 || !l.bitmap[istar][fstar] || l.k2[istar][fstar] != 7 ||
        l.c[istar][fstar] != 0)
      throw ConsistencyError("R17: strongest coefficient must hold k1 = 15, k2 = 7, c = 0, bitmap = 1");
  }
  if (auto v = validate_budget(p, c)) throw ConsistencyError("R17: " + *v);
}

std::vector<CVec> r17_basis(const R17Config& c, const R17Pmi& p) {
  std::vector<CVec> out;
  for (int m : decode_ports(p.i12, c)) out.push_back(port_selection_basis(c.p_csirs, m).cast<cd>());
  return out;
}

cd r17_coefficient(const R17Layer& l, int L, int i, int f) {
  if (!l.bitmap[i][f]) return 0.0;
  return amp_r16_wideband(l.k1[i / L]) * amp_r16_subband(l.k2[i][f]) * phase(l.c[i][f], 16);
}

CMat reconstruct(const R17Config& c, const R17Pmi& p, int t) {
  validate_pmi(c, p);
  require(t >= 0 && t < c.n3, "R17: frequency index out of range");
  const int K1 = c.k1(), L = c.L(), M = c.M();
  const auto basis = r17_basis(c, p);
  const auto taps = decode_tap_offset(p.i16, c);
  CMat w(c.p_csirs, c.rank);
  for (int li = 0; li < c.rank; ++li) {
    std::vector<cd> a(K1, 0.0);
    for (int i = 0; i < K1; ++i)
      for (int f = 0; f < M; ++f)
        a[i] += r17_coefficient(p.layers[li], L, i, f) *
                unit_phase(static_cast<long long>(t) * taps[f], c.n3);
    w.col(li) = combine_beams(basis, a, 1.0);
  }
  return w / std::sqrt(static_cast<double>(c.rank));
}

R17Pmi random_pmi(const R17Config& c, std::mt19937_64& rng) {
  validate_config(c);
  const int K1 = c.k1(), L = c.L(), M = c.M();
  const int k0 = r17_k0(c);
  auto uni = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  R17Pmi p;
  if (L < c.p_csirs / 2)
    p.i12 = static_cast<u64>(uni(0, static_cast<long long>(binomial(c.p_csirs / 2, L)) - 1));
  if (M == 2 && c.n_threshold == 4) p.i16 = static_cast<int>(uni(0, std::min(2, c.n3 - 2)));
  int budget = 2 * k0;
  for (int li = 0; li < c.rank; ++li) {
    R17Layer l;
    l.bitmap.assign(K1, std::vector<int>(M, 0));
    l.k2 = l.bitmap;
    l.c = l.bitmap;
    const int istar = static_cast<int>(uni(0, K1 - 1));
    const int fstar = static_cast<int>(uni(0, M - 1));
    const int cap = std::min(k0, budget - (c.rank - 1 - li));
    const int count = static_cast<int>(uni(1, cap));
    std::vector<int> cells;
    for (int x = 0; x < K1 * M; ++x)
      if (x != istar * M + fstar) cells.push_back(x);
    std::shuffle(cells.begin(), cells.end(), rng);
    l.bitmap[istar][fstar] = 1;
    l.k2[istar][fstar] = 7;
    for (int j = 0; j < count - 1; ++j) {
      const int i = cells[j] / M, f = cells[j] % M;
      l.bitmap[i][f] = 1;
      l.k2[i][f] = static_cast<int>(uni(0, 7));
      l.c[i][f] = static_cast<int>(uni(0, 15));
    }
    budget -= count;
    l.k1[istar / L] = 15;
    l.k1[1 - istar / L] = static_cast<int>(uni(1, 15));
    l.i18 = K1 * fstar + istar;
    p.layers.push_back(l);
  }
  return p;
}

}  // namespace nrcb

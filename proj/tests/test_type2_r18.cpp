#include <cmath>
#include <random>

#include "doctest.h"
#include "nrcb/type2_r16.hpp"
#include "nrcb/type2_r18.hpp"

using namespace nrcb;

namespace {

R18Config r18(int combo, int n4, int rank, int n3 = 18) {
  R18Config c;
  c.geom = {4, 2, 4, 4};
  c.param_combination = combo;
  c.n3 = n3;
  c.n4 = n4;
  c.rank = rank;
  return c;
}

}  // namespace

TEST_CASE("parameter table and K0") {
  const R16Params& p1 = r18_params(1);
  CHECK(p1.L == 2);
  CHECK(p1.pv_low == Ratio{1, 8});
  CHECK(p1.pv_high == Ratio{1, 16});
  CHECK(p1.beta == Ratio{1, 4});
  CHECK(r18_params(2).L == 2);
  CHECK(r18_params(2).beta == Ratio{1, 2});
  CHECK(r18_params(8).pv_high.num == 0);
  CHECK(r18_params(9).beta == Ratio{3, 4});
  CHECK_THROWS_AS(r18_params(10), DomainError);

  R18Config c = r18(2, 4, 1);
  REQUIRE(compute_mv(c, 1) == 5);
  CHECK(r18_k0(c) == 20);
  CHECK_THROWS_AS(validate_config(r18(8, 4, 3)), DomainError);
  CHECK_THROWS_AS(validate_config(r18(5, 3, 1)), DomainError);
}

TEST_CASE("Doppler shift decoding") {
  CHECK(decode_shifts(0, 4) == std::vector<int>{0, 1});
  CHECK(decode_shifts(2, 4) == std::vector<int>{0, 3});
  CHECK(decode_shifts(6, 8) == std::vector<int>{0, 7});
  CHECK(decode_shifts(0, 2) == std::vector<int>{0, 1});
  CHECK_THROWS(decode_shifts(1, 2));
  CHECK_THROWS(decode_shifts(std::nullopt, 4));
  CHECK(decode_shifts(std::nullopt, 1) == std::vector<int>{0});
  CHECK_THROWS_AS(decode_shifts(0, 1), FormatError);
}

TEST_CASE("rank restriction bits") {
  for (int r = 1; r <= 4; ++r) CHECK(check_ri_restriction(0b1111, r));
  CHECK_FALSE(check_ri_restriction(0b1110, 1));
  CHECK(check_ri_restriction(0b0001, 1));
  for (int r = 2; r <= 4; ++r) CHECK_FALSE(check_ri_restriction(0b0001, r));

  std::mt19937_64 rng(1);
  R18Config c = r18(5, 4, 1);
  const R18Pmi p = random_pmi(c, rng);
  c.ri_restriction = 0b1110;
  CHECK_THROWS_AS(validate_pmi(c, p), RestrictionError);
}

TEST_CASE("N4 = 1 reduces to the R16 report") {
  std::mt19937_64 rng(6);
  int checked = 0;
  for (int combo : {1, 3, 5, 6}) {
    for (int rank : {1, 2, 3}) {
      R16Config c16;
      c16.geom = {4, 2, 4, 4};
      c16.param_combination = combo;
      c16.n3 = combo == 1 ? 24 : 18;
      c16.rank = rank;
      R18Config c18 = r18(combo, 1, rank, c16.n3);
      // The two tables agree on L and pv for these rows; beta may differ but
      // only affects the budget, which random reports already satisfy.
      if (r16_params(combo).L != r18_params(combo).L ||
          !(r16_params(combo).pv_low == r18_params(combo).pv_low) ||
          !(r16_params(combo).pv_high == r18_params(combo).pv_high))
        continue;
      for (int trial = 0; trial < 40; ++trial) {
        R16Pmi p16;
        try {
          p16 = random_pmi(c16, rng);
          reconstruct(c16, p16, 0);
        } catch (const DegenerateError&) {
          continue;
        }
        const R18Pmi p18 = embed_r16(p16);
        if (validate_budget(p18, c18)) continue;
        for (int t = 0; t < c16.n3; ++t)
          CHECK((reconstruct(c18, p18, t, 0) - reconstruct(c16, p16, t)).cwiseAbs().maxCoeff() <= 1e-12);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);

  R18Config c = r18(5, 1, 1);
  std::mt19937_64 g(2);
  R18Pmi p = random_pmi(c, g);
  CHECK_NOTHROW(validate_pmi(c, p));
  p.layers[0].i110 = 0;
  CHECK_THROWS_AS(validate_pmi(c, p), FormatError);
}

TEST_CASE("zero second-shift coefficients give a constant precoder over intervals") {
  std::mt19937_64 rng(4);
  const R18Config c = r18(5, 4, 1);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    R18Pmi p = random_pmi(c, rng);
    auto& l = p.layers[0];
    const auto col = tap0_column(l);
    const int i_star = strongest_from_indicator(col, l.i18, 1);
    if (i_star >= 2 * c.L()) continue;
    for (auto* cube : {&l.bitmap, &l.k2, &l.c})
      for (auto& row : (*cube)[1])
        for (int& v : row) v = 0;
    try {
      for (int t = 0; t < c.n3; t += 5) {
        const CMat w0 = reconstruct(c, p, t, 0);
        for (int iota = 1; iota < c.n4; ++iota)
          CHECK((reconstruct(c, p, t, iota) - w0).cwiseAbs().maxCoeff() <= 1e-12);
      }
      ++checked;
    } catch (const DegenerateError&) {
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("strongest indicator in the concatenated shift order") {
  std::mt19937_64 rng(9);
  for (int rank : {1, 2}) {
    const R18Config c = r18(5, 4, rank);
    const int twoL = 2 * c.L();
    for (int trial = 0; trial < 50; ++trial) {
      const R18Pmi p = random_pmi(c, rng);
      for (const auto& l : p.layers) {
        const auto col = tap0_column(l);
        REQUIRE(static_cast<int>(col.size()) == 2 * twoL);
        const int s = strongest_from_indicator(col, l.i18, rank);
        if (rank > 1) CHECK(s == l.i18);
        const int tau = s / twoL, i = s % twoL;
        CHECK(l.bitmap[tau][i][0] == 1);
        CHECK(l.k2[tau][i][0] == 7);
        CHECK(l.c[tau][i][0] == 0);
        CHECK(l.k1[i / c.L()] == 15);
      }
    }
  }
}

TEST_CASE("budget violation") {
  std::mt19937_64 rng(10);
  const R18Config c = r18(2, 4, 1);
  R18Pmi p = random_pmi(c, rng);
  CHECK_FALSE(validate_budget(p, c).has_value());
  int count = 0;
  for (auto& sh : p.layers[0].bitmap)
    for (auto& row : sh)
      for (int b : row) count += b;
  for (auto& sh : p.layers[0].bitmap)
    for (auto& row : sh)
      for (int& b : row)
        if (!b && count <= r18_k0(c)) {
          b = 1;
          ++count;
        }
  REQUIRE(count == r18_k0(c) + 1);
  CHECK(validate_budget(p, c).has_value());
}

TEST_CASE("random reports have unit layer power on every unit and interval") {
  std::mt19937_64 rng(13);
  int built = 0;
  for (int combo = 1; combo <= 9; ++combo)
    for (int rank = 1; rank <= 4; ++rank)
      for (int n4 : {1, 2, 4, 8}) {
        if (r18_params(combo).pv_high.num == 0 && rank > 2) continue;
        const R18Config c = r18(combo, n4, rank);
        for (int trial = 0; trial < 4; ++trial) {
          try {
            const R18Pmi p = random_pmi(c, rng);
            CHECK_NOTHROW(validate_pmi(c, p));
            for (int t = 0; t < c.n3; ++t)
              for (int iota = 0; iota < n4; ++iota) {
                const CMat w = reconstruct(c, p, t, iota);
                for (int l = 0; l < rank; ++l)
                  CHECK(std::abs(w.col(l).norm() * std::sqrt(rank) - 1) <= 1e-9);
              }
            ++built;
          } catch (const DegenerateError&) {
          }
        }
      }
  CHECK(built > 400);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "nrcb/beamforming.hpp"
#include "nrcb/type1.hpp"

using namespace nrcb;

namespace {

bool close(const CMat& a, const CMat& b, double tol = 1e-12) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

CMat col(std::initializer_list<cd> v) {
  CMat out(static_cast<int>(v.size()), 1);
  int i = 0;
  for (cd x : v) out(i++, 0) = x;
  return out;
}

// Every valid PMI of a configuration with a single subband.
template <class F>
void for_each_pmi(const Type1Config& cfg, F&& f) {
  const int n13 = cfg.rank == 2 ? i13_count(cfg.geom) : 1;
  for (int a = 0; a < i11_count(cfg); ++a)
    for (int b = 0; b < i12_count(cfg); ++b)
      for (int c = 0; c < n13; ++c)
        for (int d = 0; d < i2_count(cfg); ++d) f(Type1Pmi{a, b, c, {d}});
}

}  // namespace

TEST_CASE("k_offsets follow the three regimes") {
  CHECK(k_offsets(1, {4, 1, 4, 1}) == std::pair{4, 0});
  CHECK(k_offsets(1, {2, 2, 4, 4}) == std::pair{4, 0});
  CHECK(k_offsets(1, {4, 2, 4, 4}) == std::pair{4, 0});
  CHECK(k_offsets(2, {2, 2, 4, 4}) == std::pair{0, 4});
  CHECK(k_offsets(3, {2, 2, 4, 4}) == std::pair{4, 4});
  CHECK(k_offsets(3, {4, 1, 4, 1}) == std::pair{12, 0});
  CHECK(k_offsets(2, {4, 1, 4, 1}) == std::pair{8, 0});
  CHECK(k_offsets(2, {4, 2, 4, 4}) == std::pair{0, 4});
  CHECK(k_offsets(3, {4, 2, 4, 4}) == std::pair{8, 0});
  CHECK(k_offsets(1, {2, 1, 4, 1}) == std::pair{4, 0});
  CHECK_THROWS_AS(k_offsets(2, {2, 1, 4, 1}), DomainError);
  CHECK_THROWS_AS(k_offsets(4, {4, 1, 4, 1}), DomainError);
}

TEST_CASE("rank-1 examples") {
  const Type1Config cfg{{2, 1, 4, 1}, 1, 1, 1};
  CHECK(close(build_rank1(cfg, {0, 0, 0, {0}}, 0), 0.5 * col({1, 1, 1, 1})));
  CHECK(close(build_rank1(cfg, {0, 0, 0, {1}}, 0), 0.5 * col({1, 1, cd(0, 1), cd(0, 1)})));
  const cd j(0, 1);
  for (int i2 = 0; i2 < 4; ++i2) {
    const cd phi = std::polar(1.0, M_PI * i2 / 2);
    CHECK(close(build_rank1(cfg, {2, 0, 0, {i2}}, 0), 0.5 * col({1, j, phi, phi * j})));
  }
}

TEST_CASE("rank-2 structure") {
  const Type1Config cfg{{4, 1, 4, 1}, 1, 2, 1};
  const CMat w = build_rank2(cfg, {3, 0, 0, {1}}, 0);
  CHECK(close(w.col(0).head(4), w.col(1).head(4)));
  CHECK(std::abs(w.col(0).dot(w.col(1))) <= 1e-12);

  const Type1Config m2{{4, 2, 4, 4}, 2, 2, 1};
  for (int i11 = 0; i11 < i11_count(m2); ++i11) {
    const auto s = resolve_beam(m2, {i11, 1, 0, {2}}, 0);
    CHECK(s.l == 2 * i11 + 1);
    CHECK(s.m == 2);
    CHECK(s.n == 0);
  }
  CHECK(resolve_beam(m2, {1, 1, 0, {5}}, 0).l == 2);
  CHECK(resolve_beam(m2, {1, 1, 0, {5}}, 0).m == 3);
  CHECK(resolve_beam(m2, {1, 1, 0, {7}}, 0).l == 3);
  CHECK(resolve_beam(m2, {1, 1, 0, {7}}, 0).n == 1);
}

TEST_CASE("mode 2 needs a vertical dimension") {
  CHECK_THROWS_AS(validate_config({{4, 1, 4, 1}, 2, 1, 1}), DomainError);
  CHECK_NOTHROW(validate_config({{2, 2, 4, 4}, 2, 1, 1}));
}

// Each layer carries 1/v of the unit transmit power.
TEST_CASE("exhaustive sweep: unit norm and orthogonality") {
  for (const ArrayGeometry g : {ArrayGeometry{4, 1, 4, 1}, ArrayGeometry{2, 2, 4, 4}})
    for (int mode : {1, 2})
      for (int rank : {1, 2}) {
        const Type1Config cfg{g, mode, rank, 1};
        if (mode == 2 && g.n2 == 1) continue;
        int count = 0;
        for_each_pmi(cfg, [&](const Type1Pmi& p) {
          const CMat w = build_type1(cfg, p, 0);
          ++count;
          for (int c = 0; c < w.cols(); ++c)
            CHECK(std::abs(w.col(c).norm() * std::sqrt(rank) - 1) <= 1e-12);
          if (rank == 2) CHECK(std::abs(w.col(0).dot(w.col(1))) <= 1e-12);
        });
        CHECK(count > 0);
      }
}

TEST_CASE("co-phasing identity on split polarizations") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  const Type1Config cfg{{4, 2, 4, 4}, 1, 1, 1};
  CMat h1(2, 8), h2(2, 8);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 8; ++k) {
      h1(i, k) = cd(nd(rng), nd(rng));
      h2(i, k) = cd(nd(rng), nd(rng));
    }
  CMat h(2, 16);
  h << h1, h2;
  for (int i2 = 0; i2 < 4; ++i2) {
    const Type1Pmi p{5, 3, 0, {i2}};
    const CVec v = dft_beam(cfg.geom, 5, 3);
    const cd phi = std::polar(1.0, M_PI * i2 / 2);
    const CMat lhs = h * build_rank1(cfg, p, 0) * std::sqrt(16.0);
    const CMat rhs = h1 * v + phi * h2 * v;
    CHECK(close(lhs, rhs));
  }
}

TEST_CASE("beam and rank restriction") {
  const Type1Config cfg{{2, 2, 4, 4}, 1, 1, 1};
  const size_t bits = 8 * 8;
  std::vector<bool> all(bits, true);
  std::vector<bool> no00 = all;
  no00[0] = false;
  CHECK(check_beam_restriction(all, cfg, {0, 0, 0, {0}}));
  CHECK_FALSE(check_beam_restriction(no00, cfg, {0, 0, 0, {0}}));
  std::vector<bool> no10 = all;
  no10[8] = false;
  CHECK_FALSE(check_beam_restriction(no10, cfg, {1, 0, 0, {0}}));
  CHECK(check_beam_restriction(no10, cfg, {0, 1, 0, {0}}));
  CHECK_THROWS_AS(build_type1(cfg, {0, 0, 0, {0}}, 0, Type1Restriction{no00, std::bitset<8>().set()}),
                  RestrictionError);

  const std::bitset<8> r("00001011");
  CHECK(check_rank_restriction(r, 1));
  CHECK(check_rank_restriction(r, 2));
  CHECK_FALSE(check_rank_restriction(r, 3));
  CHECK(check_rank_restriction(r, 4));
  for (int k = 1; k <= 8; ++k) CHECK(check_rank_restriction(std::bitset<8>().set(), k));
  CHECK_FALSE(check_rank_restriction(std::bitset<8>("11111110"), 1));
  CHECK_THROWS_AS(build_type1(cfg, {0, 0, 0, {0}}, 0, Type1Restriction{{}, std::bitset<8>("11111110")}),
                  RestrictionError);
}

TEST_CASE("search recovers a planted beam and honours masks") {
  const Type1Config cfg{{4, 1, 4, 1}, 1, 1, 2};
  const Type1Pmi planted{6, 0, 0, {3, 1}};
  std::vector<CMat> hs;
  for (int sb = 0; sb < 2; ++sb) hs.push_back(build_type1(cfg, planted, sb).adjoint());
  CHECK(search_type1(hs, cfg) == planted);

  std::vector<bool> mask(16, true);
  mask[6] = false;
  const Type1Pmi other = search_type1(hs, cfg, Type1Restriction{mask, std::bitset<8>().set()});
  CHECK(other.i11 != 6);

  std::vector<CMat> zero{CMat::Zero(1, 8)};
  CHECK_THROWS_AS(search_type1(zero, {{4, 1, 4, 1}, 1, 1, 1}), DegenerateError);
}

TEST_CASE("search equals an independent brute-force argmax") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int rank : {1, 2}) {
    const Type1Config cfg{{2, 2, 4, 4}, 1, rank, 1};
    for (int trial = 0; trial < 5; ++trial) {
      CMat h(2, 8);
      for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 8; ++k) h(i, k) = cd(nd(rng), nd(rng));
      double best = -1;
      Type1Pmi arg;
      for_each_pmi(cfg, [&](const Type1Pmi& p) {
        const double r = su_rate(h, build_type1(cfg, p, 0), 1.0);
        if (r > best + 1e-12) {
          best = r;
          arg = p;
        }
      });
      const Type1Pmi got = search_type1({h}, cfg);
      CHECK(su_rate(h, build_type1(cfg, got, 0), 1.0) == doctest::Approx(best).epsilon(1e-12));
      CHECK(got == arg);
    }
  }
}

TEST_CASE("pmi validation") {
  const Type1Config cfg{{4, 1, 4, 1}, 1, 1, 2};
  CHECK_THROWS_AS(validate_pmi(cfg, {16, 0, 0, {0, 0}}), DomainError);
  CHECK_THROWS_AS(validate_pmi(cfg, {0, 0, 0, {0}}), DomainError);
  CHECK_THROWS_AS(validate_pmi(cfg, {0, 0, 0, {4, 0}}), DomainError);
  CHECK_THROWS_AS(validate_pmi(cfg, {0, 0, 1, {0, 0}}), DomainError);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) CHECK_NOTHROW(validate_pmi(cfg, random_pmi(cfg, rng)));
}

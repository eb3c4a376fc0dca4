#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "nrcb/channel_sim.hpp"
#include "nrcb/quantization.hpp"
#include "nrcb/type2_r16.hpp"

using namespace nrcb;

namespace {

R16Config regular(int combo, int n3, int rank) {
  R16Config c;
  c.geom = {4, 2, 4, 4};
  c.param_combination = combo;
  c.n3 = n3;
  c.rank = rank;
  return c;
}

// A rank-1 report whose only coefficient is the strongest one at beam i*.
R16Pmi single_coefficient(const R16Config& c, int i_star) {
  const int L = c.L(), mv = compute_mv(c, c.rank);
  R16Pmi p;
  R16Layer l;
  l.i16 = 0;
  l.bitmap.assign(2 * L, std::vector<int>(mv, 0));
  l.k2.assign(2 * L, std::vector<int>(mv, 0));
  l.c.assign(2 * L, std::vector<int>(mv, 0));
  l.bitmap[i_star][0] = 1;
  l.k2[i_star][0] = 7;
  l.k1[i_star / L] = 15;
  l.k1[1 - i_star / L] = 9;
  l.i18 = 0;
  p.layers = {l};
  if (c.n3 > 19) p.i15 = 0;
  return p;
}

}  // namespace

TEST_CASE("parameter table") {
  const R16Params& p5 = r16_params(5);
  CHECK(p5.L == 4);
  CHECK(p5.pv_low == Ratio{1, 4});
  CHECK(p5.pv_high == Ratio{1, 4});
  CHECK(p5.beta == Ratio{3, 4});
  CHECK(r16_params(1).L == 2);
  CHECK(r16_params(6).beta == Ratio{1, 2});
  CHECK(r16_params(7).L == 6);
  CHECK(r16_params(7).pv_high.num == 0);
  CHECK_THROWS_AS(r16_params(0), DomainError);
  CHECK_THROWS_AS(r16_params(9), DomainError);
  CHECK_THROWS_AS(validate_config(regular(7, 18, 3)), DomainError);
  CHECK_NOTHROW(validate_config(regular(6, 18, 4)));
}

TEST_CASE("derive_n3 and compute_mv") {
  CHECK(derive_n3(273, 16, 1) == 18);
  CHECK(derive_n3(273, 16, 2) == 36);
  CHECK(derive_n3(24, 4, 1) == 6);
  CHECK_THROWS_AS(derive_n3(24, 16, 1), DomainError);
  CHECK_THROWS_AS(derive_n3(273, 16, 3), DomainError);

  CHECK(compute_mv(regular(1, 18, 1), 1) == 5);
  CHECK(compute_mv(regular(1, 18, 3), 3) == 3);
  R16Config c = regular(1, 4, 1);
  c.r = 2;
  CHECK(compute_mv(c, 1) == 1);
  CHECK(ceil_ratio(Ratio{1, 4}, 18) == 5);
  CHECK(ceil_ratio(Ratio{1, 8}, 18) == 3);
}

TEST_CASE("K0 and budgets") {
  CHECK(r16_k0(regular(4, 18, 1)) == 20);
  std::mt19937_64 rng(1);
  R16Config c = regular(4, 18, 2);
  R16Pmi p = random_pmi(c, rng);
  CHECK_FALSE(validate_budget(p, c).has_value());

  // Fill layer 0 up to K0 + 1 nonzero entries.
  const int mv = compute_mv(c, 2);
  int count = 0;
  for (auto& row : p.layers[0].bitmap)
    for (int& b : row) count += b;
  for (int i = 0; i < 2 * c.L() && count <= 20; ++i)
    for (int f = 0; f < mv && count <= 20; ++f)
      if (!p.layers[0].bitmap[i][f]) {
        p.layers[0].bitmap[i][f] = 1;
        ++count;
      }
  REQUIRE(count == 21);
  CHECK(validate_budget(p, c).has_value());

  // Two layers with exactly K0 each are fine.
  R16Pmi q = random_pmi(c, rng);
  for (auto& layer : q.layers) {
    int n = 0;
    for (auto& row : layer.bitmap)
      for (int& b : row) {
        b = n < 20 ? 1 : 0;
        n += b;
      }
    for (int i = 0; i < 2 * c.L(); ++i)
      for (int f = 0; f < mv; ++f)
        if (!layer.bitmap[i][f]) layer.k2[i][f] = layer.c[i][f] = 0;
  }
  CHECK_FALSE(validate_budget(q, c).has_value());
}

TEST_CASE("tap decode against brute force, direct range") {
  for (int n3 = 6; n3 <= 19; ++n3)
    for (int mv = 1; mv <= 5 && mv <= n3; ++mv) {
      std::set<std::vector<int>> seen;
      const u64 count = tap_combination_count(n3, mv);
      CHECK(count == binomial(n3 - 1, mv - 1));
      for (u64 i = 0; i < count; ++i) {
        const auto taps = decode_taps(i, n3, mv);
        REQUIRE(static_cast<int>(taps.size()) == mv);
        CHECK(taps[0] == 0);
        CHECK(std::is_sorted(taps.begin(), taps.end()));
        CHECK(taps.back() < n3);
        CHECK(encode_taps(taps, n3, mv) == i);
        seen.insert(taps);
      }
      CHECK(seen.size() == count);
      CHECK_THROWS_AS(decode_taps(count, n3, mv), FormatError);
    }
  CHECK(decode_taps(0, 18, 1) == std::vector<int>{0});
  CHECK(decode_taps(0, 18, 3) == std::vector<int>{0, 16, 17});
}

TEST_CASE("tap decode against brute force, windowed range") {
  for (int n3 = 20; n3 <= 36; ++n3)
    for (int mv = 1; mv <= 5; ++mv)
      for (int m_init = -2 * mv + 1; m_init <= 0; ++m_init) {
        // Window {M_init, ..., M_init + 2Mv - 1} modulo n3, tap 0 excluded.
        std::set<int> window;
        for (int k = m_init; k < m_init + 2 * mv; ++k)
          if (k != 0) window.insert(((k % n3) + n3) % n3);
        std::set<std::vector<int>> seen;
        const u64 count = tap_combination_count(n3, mv);
        CHECK(count == binomial(2 * mv - 1, mv - 1));
        for (u64 i = 0; i < count; ++i) {
          const auto taps = decode_taps(i, n3, mv, m_init);
          CHECK(taps[0] == 0);
          for (size_t f = 1; f < taps.size(); ++f) CHECK(window.count(taps[f]) == 1);
          CHECK(encode_taps(taps, n3, mv, m_init) == i);
          seen.insert(taps);
        }
        CHECK(seen.size() == count);
      }
  CHECK(m_initial_from_i15(1, 5) == -9);
  CHECK(i15_from_m_initial(-9, 5) == 1);
  CHECK(i15_from_m_initial(0, 5) == 0);
  for (int i = 0; i < 10; ++i) CHECK(i15_from_m_initial(m_initial_from_i15(i, 5), 5) == i);
  CHECK_THROWS_AS(m_initial_from_i15(10, 5), DomainError);
  // M_initial = -9, Mv = 5, n3 = 36: no decoded value is at most 0, so all
  // move by n3 - 2Mv = 26 into 27..35.
  for (u64 i = 0; i < tap_combination_count(36, 5); ++i) {
    const auto taps = decode_taps(i, 36, 5, -9);
    for (size_t f = 1; f < taps.size(); ++f) CHECK((taps[f] >= 27 && taps[f] <= 35));
  }
}

TEST_CASE("remapping") {
  CHECK(remap_taps({0, 3, 7}, 0, 18) == std::vector<int>{0, 3, 7});
  CHECK(remap_taps({2, 5}, 1, 18) == std::vector<int>{15, 0});
  CHECK(remap_positions(std::vector<int>{10, 11, 12}, 1) == std::vector<int>{11, 12, 10});
  CHECK(remap_positions(std::vector<int>{10, 11, 12}, 0) == std::vector<int>{10, 11, 12});
}

TEST_CASE("strongest indicator") {
  CHECK(strongest_indicator({1, 0, 1, 1}, 3, 2) == 3);
  CHECK(strongest_indicator({1, 0, 1, 0}, 2, 1) == 1);
  CHECK(strongest_indicator({1, 0, 1, 0}, 0, 1) == 0);
  CHECK_THROWS(strongest_indicator({1, 0, 1, 0}, 1, 1));
  for (int i : {0, 2, 3}) CHECK(strongest_from_indicator({1, 0, 1, 1}, strongest_indicator({1, 0, 1, 1}, i, 1), 1) == i);
  CHECK(strongest_from_indicator({1, 0, 1, 1}, 3, 2) == 3);
}

TEST_CASE("single strongest coefficient gives one scaled beam for every t") {
  for (int i_star : {0, 5}) {
    R16Config c = regular(5, 18, 1);
    R16Pmi p = single_coefficient(c, i_star);
    p.layers[0].i18 = strongest_indicator(
        [&] {
          std::vector<int> col;
          for (const auto& row : p.layers[0].bitmap) col.push_back(row[0]);
          return col;
        }(),
        i_star, 1);
    CHECK_NOTHROW(validate_pmi(c, p));
    const auto basis = r16_basis(c, p);
    const int L = c.L();
    const CMat w0 = reconstruct(c, p, 0);
    for (int t = 0; t < c.n3; ++t) {
      const CMat w = reconstruct(c, p, t);
      CHECK((w - w0).cwiseAbs().maxCoeff() <= 1e-12);
      CVec want = CVec::Zero(16);
      want.segment(8 * (i_star / L), 8) = basis[i_star % L] / std::sqrt(8.0);
      CHECK((w.col(0) - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("Mv = 1 gives the same precoder on every unit") {
  std::mt19937_64 rng(4);
  R16Config c = regular(1, 4, 1);
  c.r = 2;
  REQUIRE(compute_mv(c, 1) == 1);
  for (int trial = 0; trial < 10; ++trial) {
    try {
      const auto p = random_pmi(c, rng);
      const CMat w0 = reconstruct(c, p, 0);
      for (int t = 1; t < 4; ++t) CHECK((reconstruct(c, p, t) - w0).cwiseAbs().maxCoeff() <= 1e-12);
    } catch (const DegenerateError&) {
    }
  }
}

TEST_CASE("consistency and defaults are enforced") {
  R16Config c = regular(5, 18, 1);
  R16Pmi p = single_coefficient(c, 0);
  CHECK_NOTHROW(validate_pmi(c, p));
  R16Pmi bad = p;
  bad.layers[0].k2[1][2] = 3;  // bitmap is zero there
  CHECK_THROWS_AS(validate_pmi(c, bad), ConsistencyError);
  bad = p;
  bad.layers[0].k2[0][0] = 6;
  CHECK_THROWS_AS(validate_pmi(c, bad), ConsistencyError);
  bad = p;
  bad.layers[0].k1[0] = 14;
  CHECK_THROWS_AS(validate_pmi(c, bad), ConsistencyError);
  bad = p;
  bad.layers[0].c[0][0] = 1;
  CHECK_THROWS_AS(validate_pmi(c, bad), ConsistencyError);
  bad = p;
  bad.i15 = 0;
  CHECK_THROWS(validate_pmi(c, bad));
  bad = p;
  bad.layers[0].i16 = tap_combination_count(18, 5);
  CHECK_THROWS_AS(validate_pmi(c, bad), FormatError);
}

TEST_CASE("random reports have unit layer power on every unit") {
  std::mt19937_64 rng(12);
  int built = 0;
  for (int combo = 1; combo <= 8; ++combo)
    for (int rank = 1; rank <= 4; ++rank)
      for (int n3 : {18, 24}) {
        R16Config c = regular(combo, n3, rank);
        if (r16_params(combo).pv_high.num == 0 && rank > 2) continue;
        for (int trial = 0; trial < 8; ++trial) {
          R16Pmi p;
          try {
            p = random_pmi(c, rng);
            CHECK_NOTHROW(validate_pmi(c, p));
            for (int t = 0; t < n3; ++t) {
              const CMat w = reconstruct(c, p, t);
              for (int l = 0; l < rank; ++l)
                CHECK(std::abs(w.col(l).norm() * std::sqrt(rank) - 1) <= 1e-9);
            }
            ++built;
          } catch (const DegenerateError&) {
          }
        }
      }
  CHECK(built > 300);
}

TEST_CASE("port selection equals regular under DFT port beamforming") {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> nd;
  const ArrayGeometry g{4, 2, 4, 4};
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    R16Config reg = regular(5, 18, 2);
    R16Config ps = reg;
    ps.variant = CodebookVariant::PortSelection;
    ps.p_csirs = 16;
    ps.d = 2;
    R16Pmi pr, pp;
    try {
      pr = random_pmi(reg, rng);
      pp = random_pmi(ps, rng);
      pp.layers = pr.layers;
      pp.i15 = pr.i15;
      reconstruct(reg, pr, 0);
    } catch (const DegenerateError&) {
      continue;
    }
    const auto beams = r16_basis(reg, pr);
    CMat f(8, 8);
    for (int i = 0; i < 8; ++i) f.col(i) = dft_beam(g, (i * 7) % 16, (i * 3) % 8) / std::sqrt(8.0);
    for (int i = 0; i < reg.L(); ++i) f.col((pp.i11 * ps.d + i) % 8) = beams[i] / std::sqrt(8.0);
    CMat h1(2, 8), h2(2, 8);
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 8; ++k) {
        h1(r, k) = cd(nd(rng), nd(rng));
        h2(r, k) = cd(nd(rng), nd(rng));
      }
    CMat h(2, 16);
    h << h1, h2;
    const CMat heff = effective_channel(h1, h2, f);
    for (int t = 0; t < reg.n3; ++t) {
      const CMat yr = h * reconstruct(reg, pr, t);
      const CMat yp = heff * reconstruct(ps, pp, t);
      CHECK((yr - yp).cwiseAbs().maxCoeff() <= 1e-10);
    }
    ++checked;
  }
  CHECK(checked >= 90);
}

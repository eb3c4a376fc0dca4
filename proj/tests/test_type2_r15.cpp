#include <cmath>
#include <random>

#include "doctest.h"
#include "nrcb/channel_sim.hpp"
#include "nrcb/quantization.hpp"
#include "nrcb/type2_r15.hpp"

using namespace nrcb;

namespace {

T2R15Layer flat_layer(int L, int subbands) {
  T2R15Layer l;
  l.i13 = 0;
  l.k1.assign(2 * L, 0);
  l.k1[0] = 7;
  l.k2.assign(subbands, std::vector<int>(2 * L, 1));
  l.c.assign(subbands, std::vector<int>(2 * L, 0));
  return l;
}

std::vector<bool> bits_msb(u64 v, int width) {
  std::vector<bool> out(width);
  for (int i = 0; i < width; ++i) out[i] = (v >> (width - 1 - i)) & 1u;
  return out;
}

}  // namespace

TEST_CASE("single nonzero coefficient gives a single beam on one polarization") {
  T2R15Config cfg;
  cfg.geom = {4, 1, 4, 1};
  cfg.L = 2;
  T2R15Pmi p;
  p.q1 = 1;
  p.i12 = 0;
  p.layers = {flat_layer(2, 1)};
  const CMat w = reconstruct(cfg, p, 0);
  const auto coords = r15_beam_coords(cfg, p);
  const CVec v = dft_beam(cfg.geom, coords[0].first, coords[0].second) / 2.0;
  CHECK((w.col(0).head(4) - v).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(w.col(0).tail(4).norm() <= 1e-12);
}

TEST_CASE("beam selection follows the group and combination index") {
  T2R15Config cfg;
  cfg.geom = {4, 2, 4, 4};
  cfg.L = 3;
  T2R15Pmi p;
  p.q1 = 2;
  p.q2 = 3;
  p.i12 = 17;
  const auto s = decode_combination(17, 8, 3);
  const auto coords = r15_beam_coords(cfg, p);
  for (int i = 0; i < 3; ++i) {
    const auto [n1, n2] = split_beam_index(s[i], 4);
    CHECK(coords[i].first == 4 * n1 + 2);
    CHECK(coords[i].second == 4 * n2 + 3);
  }
}

TEST_CASE("reporting rules") {
  CHECK(k2_limit(2) == 4);
  CHECK(k2_limit(3) == 4);
  CHECK(k2_limit(4) == 6);

  T2R15Config cfg;
  cfg.geom = {4, 1, 4, 1};
  cfg.L = 4;
  cfg.subband_amplitude = true;
  T2R15Pmi p;
  T2R15Layer l = flat_layer(4, 1);
  l.i13 = 3;
  l.k1 = {6, 5, 4, 7, 3, 2, 1, 1};
  p.layers = {l};
  const auto mask = reporting_mask(cfg, p)[0];
  int amp = 0, coarse = 0;
  for (auto r : mask) {
    amp += r == R15Report::AmpAndPhase;
    coarse += r == R15Report::CoarsePhase;
  }
  CHECK(mask[3] == R15Report::Strongest);
  CHECK(amp == 5);
  CHECK(coarse == 2);
  CHECK(mask[0] == R15Report::AmpAndPhase);
  CHECK(mask[6] == R15Report::CoarsePhase);

  l.k1[1] = 0;
  p.layers = {l};
  CHECK(reporting_mask(cfg, p)[0][1] == R15Report::None);

  cfg.subband_amplitude = false;
  p.layers = {flat_layer(4, 1)};
  p.layers[0].k1 = {7, 3, 3, 3, 3, 3, 3, 3};
  for (int i = 1; i < 8; ++i) CHECK(reporting_mask(cfg, p)[0][i] == R15Report::Phase);
  const auto coef = r15_coefficients(cfg, p, 0, 0);
  for (int i = 1; i < 8; ++i) CHECK(std::abs(std::abs(coef[i]) - amp_r15_wideband(3)) <= 1e-15);
}

TEST_CASE("strongest defaults and consistency are enforced") {
  T2R15Config cfg;
  cfg.geom = {4, 1, 4, 1};
  cfg.L = 2;
  cfg.subband_amplitude = true;
  T2R15Pmi p;
  p.layers = {flat_layer(2, 1)};
  CHECK_NOTHROW(validate_pmi(cfg, p));
  p.layers[0].k1[0] = 6;
  CHECK_THROWS_AS(validate_pmi(cfg, p), ConsistencyError);
  p.layers = {flat_layer(2, 1)};
  p.layers[0].c[0][0] = 1;
  CHECK_THROWS_AS(validate_pmi(cfg, p), ConsistencyError);
  p.layers = {flat_layer(2, 1)};
  p.layers[0].c[0][2] = 3;  // zero wideband amplitude carries no phase
  CHECK_THROWS_AS(validate_pmi(cfg, p), ConsistencyError);
  p.layers = {flat_layer(2, 1)};
  p.q1 = 4;
  CHECK_THROWS_AS(validate_pmi(cfg, p), DomainError);
}

TEST_CASE("random reports reconstruct to unit layer power") {
  std::mt19937_64 rng(5);
  for (int rank : {1, 2})
    for (bool sb : {false, true})
      for (int L : {2, 3, 4}) {
        T2R15Config cfg;
        cfg.geom = {4, 2, 4, 4};
        cfg.L = L;
        cfg.rank = rank;
        cfg.subband_amplitude = sb;
        cfg.n_psk = sb ? 8 : 4;
        cfg.subband_count = 3;
        for (int trial = 0; trial < 40; ++trial) {
          const auto p = random_pmi(cfg, rng);
          CHECK_NOTHROW(validate_pmi(cfg, p));
          for (int s = 0; s < 3; ++s) {
            const CMat w = reconstruct(cfg, p, s);
            for (int c = 0; c < rank; ++c)
              CHECK(std::abs(w.col(c).norm() * std::sqrt(rank) - 1) <= 1e-9);
          }
        }
      }
}

TEST_CASE("port selection equals regular under DFT port beamforming") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  const ArrayGeometry g{4, 2, 4, 4};
  for (int trial = 0; trial < 100; ++trial) {
    T2R15Config reg;
    reg.geom = g;
    reg.L = 4;
    reg.rank = 2;
    reg.subband_amplitude = true;
    reg.subband_count = 2;
    T2R15Config ps = reg;
    ps.variant = CodebookVariant::PortSelection;
    ps.p_csirs = 16;
    ps.d = 2;
    const T2R15Pmi pr = random_pmi(reg, rng);
    T2R15Pmi pp = random_pmi(ps, rng);
    pp.layers = pr.layers;
    const auto beams = r15_basis(reg, pr);
    CMat f = CMat::Zero(8, 8);
    for (int i = 0; i < 8; ++i) f.col(i) = dft_beam(g, (i * 5) % 16, (i * 3) % 8) / std::sqrt(8.0);
    for (int i = 0; i < reg.L; ++i) f.col((pp.i11 * ps.d + i) % 8) = beams[i] / std::sqrt(8.0);
    CMat h1(2, 8), h2(2, 8);
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 8; ++k) {
        h1(r, k) = cd(nd(rng), nd(rng));
        h2(r, k) = cd(nd(rng), nd(rng));
      }
    CMat h(2, 16);
    h << h1, h2;
    const CMat heff = effective_channel(h1, h2, f);
    for (int s = 0; s < 2; ++s) {
      const CMat yr = h * reconstruct(reg, pr, s);
      const CMat yp = heff * reconstruct(ps, pp, s);
      CHECK((yr - yp).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("subset restriction decoding") {
  const ArrayGeometry g{4, 2, 4, 4};
  const auto b1 = bits_msb(1819, 11);
  std::vector<bool> b2(4 * 2 * 8, true);
  const auto open = subset_restriction(b1, b2, g);
  for (int k = 0; k < 4; ++k) CHECK(open.groups[k].g == k);
  for (double c : open.cap) CHECK(c == 1.0);

  // Group 1 is (r1,r2) = (1,0); clear both bits of its beam (x1,x2) = (2,1),
  // labels 2*(N1*x2+x1) and +1 = 12, 13, sent at block offsets 3 and 2.
  std::vector<bool> b2z = b2;
  b2z[16 + 3] = false;
  b2z[16 + 2] = false;
  const auto caps = subset_restriction(b1, b2z, g);
  CHECK(caps.for_beam(g, 4 * 1 + 2, 2 * 0 + 1) == 0.0);
  int zeros = 0;
  for (double c : caps.cap) zeros += c == 0.0;
  CHECK(zeros == 1);
  // Only the low bit kept: 01 -> sqrt(1/4).
  b2z[16 + 3] = true;
  CHECK(subset_restriction(b1, b2z, g).for_beam(g, 6, 1) == doctest::Approx(0.5));

  CHECK_THROWS_AS(subset_restriction(bits_msb(1820, 11), b2, g), FormatError);
  CHECK_THROWS_AS(subset_restriction(bits_msb(0, 10), b2, g), FormatError);
  // O1O2 = 4 keeps the 11-bit width; only beta1 = 0 is decodable.
  const ArrayGeometry g41{4, 1, 4, 1};
  CHECK_NOTHROW(subset_restriction(bits_msb(0, 11), std::vector<bool>(32, true), g41));
  CHECK_THROWS_AS(subset_restriction(bits_msb(1, 11), std::vector<bool>(32, true), g41), FormatError);
}

TEST_CASE("search recovers a planted single beam") {
  T2R15Config cfg;
  cfg.geom = {4, 2, 4, 4};
  cfg.L = 4;
  cfg.n_psk = 8;
  const CVec v = dft_beam(cfg.geom, 6, 5);
  CMat h(1, 16);
  h.leftCols(8) = v.adjoint();
  h.rightCols(8) = v.adjoint();
  const auto p = search_t2_r15({h}, cfg);
  const auto coords = r15_beam_coords(cfg, p);
  bool found = false;
  for (const auto& [l, m] : coords) found = found || (l == 6 && m == 5);
  CHECK(found);
  const CMat w = reconstruct(cfg, p, 0);
  const double corr = std::abs((h * w)(0, 0)) / h.norm();
  CHECK(corr >= 0.99);
}

TEST_CASE("search on a two-beam channel and rank 2 on a rank-1 channel") {
  std::mt19937_64 rng(21);
  T2R15Config cfg;
  cfg.geom = {4, 1, 4, 1};
  cfg.L = 2;
  cfg.n_psk = 8;
  cfg.subband_amplitude = true;
  const CVec a = dft_beam(cfg.geom, 0, 0), b = dft_beam(cfg.geom, 4, 0);
  CVec target(8);
  target << 0.8 * a + cd(0, 0.5) * b, cd(0.3, 0.2) * a;
  const CMat h = target.adjoint();
  const auto p = search_t2_r15({h}, cfg);
  const CMat w = reconstruct(cfg, p, 0);
  const double corr = std::abs(target.normalized().dot(w.col(0)));
  CHECK(corr >= 0.95);

  cfg.rank = 2;
  const auto p2 = search_t2_r15({h}, cfg);
  CHECK_NOTHROW(validate_pmi(cfg, p2));
  const CMat w2 = reconstruct(cfg, p2, 0);
  CHECK(std::abs((h * w2.col(0))(0, 0)) > 10 * std::abs((h * w2.col(1))(0, 0)));
}

TEST_CASE("search output respects random amplitude caps") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> bit(0, 1);
  const ArrayGeometry g{4, 2, 4, 4};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> groups;
    for (int k = 0; k < 16; ++k) groups.push_back(k);
    std::shuffle(groups.begin(), groups.end(), rng);
    groups.resize(4);
    std::sort(groups.begin(), groups.end());
    const auto b1 = bits_msb(encode_group_restriction(groups, 4, 4), 11);
    std::vector<bool> b2(64);
    for (size_t i = 0; i < b2.size(); ++i) b2[i] = bit(rng);
    const auto caps = subset_restriction(b1, b2, g);
    T2R15Config cfg;
    cfg.geom = g;
    cfg.L = 4;
    CMat h(2, 16);
    for (int r = 0; r < 2; ++r)
      for (int k = 0; k < 16; ++k) h(r, k) = cd(nd(rng), nd(rng));
    const auto p = search_t2_r15({h}, cfg, &caps);
    CHECK(respects_restriction(cfg, p, caps));
  }
}

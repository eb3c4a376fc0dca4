#include "nrcb/channel_sim.hpp"

#include <cmath>
#include <numbers>

#include "nrcb/compact.hpp"

namespace nrcb {

CMat ChannelRealization::half(const CMat& full, int p) {
  require(p == 0 || p == 1, "polarization index must be 0 or 1");
  const int h = static_cast<int>(full.cols() / 2);
  return full.middleCols(p * h, h);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

CVec steering(const ArrayGeometry& g, double u1, double u2) {
  const double two_pi = 2 * std::numbers::pi;
  CVec v(g.n1 * g.n2);
  for (int i = 0; i < g.n1; ++i)
    for (int k = 0; k < g.n2; ++k)
      v(i * g.n2 + k) = std::polar(1.0, two_pi * (u1 * i / (g.n1 * g.o1) + u2 * k / (g.n2 * g.o2)));
  return v;
}

ChannelRealization draw_channel(const ChannelModel& m, const ArrayGeometry& g, int nr,
                                std::uint64_t trial) {
  validate_geometry(g);
  require(nr >= 1, "draw_channel: at least one receive antenna is required");
  require(m.units >= 1 && m.intervals >= 1, "draw_channel: unit and interval counts must be positive");
  require(m.max_delay >= 0, "draw_channel: delays must be nonnegative");
  ChannelRealization out;
  const double two_pi = 2 * std::numbers::pi;
  if (!m.fixed_paths.empty()) {
    out.paths = m.fixed_paths;
  } else {
    require(m.paths >= 1, "draw_channel: the model has no paths");
    auto rng = trial_rng(m.seed, trial);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double var = 2.0 / ((1.0 + m.xpol * m.xpol) * m.paths);
    for (int p = 0; p < m.paths; ++p) {
      PathSpec s;
      s.gain = cd(gauss(rng), gauss(rng)) * std::sqrt(var / 2);
      s.u1 = unit(rng) * g.n1 * g.o1;
      s.u2 = unit(rng) * g.n2 * g.o2;
      s.rx_phase = unit(rng) * two_pi;
      s.delay = unit(rng) * m.max_delay;
      s.doppler = (2 * unit(rng) - 1) * m.max_doppler;
      s.xpol_gain = std::polar(m.xpol, unit(rng) * two_pi);
      out.paths.push_back(s);
    }
  }
  for (const auto& s : out.paths) require(s.delay >= 0, "draw_channel: delays must be nonnegative");
  const int half = g.n1 * g.n2;
  out.h.assign(m.intervals, std::vector<CMat>(m.units, CMat::Zero(nr, 2 * half)));
  for (const auto& s : out.paths) {
    CVec rx(nr);
    for (int r = 0; r < nr; ++r) rx(r) = std::polar(1.0, s.rx_phase * r);
    const CMat outer = rx * steering(g, s.u1, s.u2).adjoint();
    for (int it = 0; it < m.intervals; ++it)
      for (int u = 0; u < m.units; ++u) {
        const double ph = -two_pi * s.delay * u * m.unit_spacing +
                          two_pi * s.doppler * it * m.interval_duration;
        const cd w = s.gain * std::polar(1.0, ph);
        out.h[it][u].leftCols(half) += w * outer;
        out.h[it][u].rightCols(half) += w * s.xpol_gain * outer;
      }
  }
  return out;
}

CMat effective_channel(const CMat& h1, const CMat& h2, const CMat& f) {
  require(h1.rows() == h2.rows() && h1.cols() == h2.cols(), "effective_channel: polarization halves differ");
  require(f.rows() == h1.cols(), "effective_channel: beamformer rows must match the array size");
  CMat out(h1.rows(), 2 * f.cols());
  out.leftCols(f.cols()) = h1 * f;
  out.rightCols(f.cols()) = h2 * f;
  return out;
}

namespace {

std::vector<CMat> plant_columns(const CMat& w, const CVec& rx) {
  std::vector<CMat> out;
  for (int t = 0; t < w.cols(); ++t) out.push_back(rx * w.col(t).adjoint());
  return out;
}

}  // namespace

std::vector<CMat> plant_r16(const R16Config& c, const R16Pmi& p, const CVec& rx) {
  return plant_columns(compact_r16(factors_r16(c, p, 0)).effective, rx);
}

std::vector<CMat> plant_r17(const R17Config& c, const R17Pmi& p, const CVec& rx) {
  return plant_columns(compact_r16(factors_r17(c, p, 0)).effective, rx);
}

std::vector<std::vector<CMat>> plant_r18(const R18Config& c, const R18Pmi& p, const CVec& rx) {
  const Tensor3 w = compact_r18_tucker(factors_r18(c, p, 0)).effective;
  std::vector<std::vector<CMat>> out;
  for (int it = 0; it < c.n4; ++it) out.push_back(plant_columns(w.slice(it), rx));
  return out;
}

}  // namespace nrcb

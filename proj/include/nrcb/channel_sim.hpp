#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nrcb/bases.hpp"
#include "nrcb/type2_r16.hpp"
#include "nrcb/type2_r17.hpp"
#include "nrcb/type2_r18.hpp"

namespace nrcb {

struct PathSpec {
  cd gain{1.0, 0.0};
  double u1 = 0.0;       // horizontal spatial frequency in oversampled-grid units, [0, N1*O1)
  double u2 = 0.0;       // vertical spatial frequency, [0, N2*O2)
  double rx_phase = 0.0; // receive-array phase progression (radians per element)
  double delay = 0.0;    // seconds
  double doppler = 0.0;  // Hz
  cd xpol_gain{1.0, 0.0};  // second-polarization weight relative to the first
};

struct ChannelModel {
  int paths = 6;
  double max_delay = 1.0e-6;      // delays uniform in [0, max_delay]
  double max_doppler = 0.0;       // Dopplers uniform in [-max, max]
  double unit_spacing = 240.0e3;  // frequency spacing between units (Hz)
  int units = 1;                  // frequency units M (subcarriers or subbands)
  int intervals = 1;              // time intervals
  double interval_duration = 1.0e-3;
  double xpol = 1.0;              // cross-polarization scalar
  std::uint64_t seed = 1;
  std::vector<PathSpec> fixed_paths;  // used verbatim when non-empty
};

struct ChannelRealization {
  std::vector<std::vector<CMat>> h;  // [interval][unit], Nr x 2N1N2
  std::vector<PathSpec> paths;
  // Polarization half p (0 or 1) of one matrix.
  static CMat half(const CMat& full, int p);
};

// Per-trial generator seeded from (seed, trial).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

// Continuous-angle transmit response; equals dft_beam at integer grid points.
CVec steering(const ArrayGeometry& geom, double u1, double u2);

ChannelRealization draw_channel(const ChannelModel& model, const ArrayGeometry& geom, int nr,
                                std::uint64_t trial = 0);

// [H1 F, H2 F] for a port-external beamformer F with N1N2 rows.
CMat effective_channel(const CMat& h1, const CMat& h2, const CMat& f);

// UE-side searches. channels[t] (or channels[iota][t]) are Nr x P.
R16Pmi search_r16(const std::vector<CMat>& channels, const R16Config& cfg);
R17Pmi search_r17(const std::vector<CMat>& channels, const R17Config& cfg);
R18Pmi search_r18(const std::vector<std::vector<CMat>>& channels, const R18Config& cfg);

// Plant-and-recover helpers: channels a * w(t)^H built from the unnormalized
// combination of a report's first layer.
std::vector<CMat> plant_r16(const R16Config& cfg, const R16Pmi& pmi, const CVec& rx);
std::vector<CMat> plant_r17(const R17Config& cfg, const R17Pmi& pmi, const CVec& rx);
std::vector<std::vector<CMat>> plant_r18(const R18Config& cfg, const R18Pmi& pmi, const CVec& rx);

}  // namespace nrcb

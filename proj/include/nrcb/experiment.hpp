#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nrcb/channel_sim.hpp"

namespace nrcb {

struct SeConfig {
  std::vector<std::pair<int, int>> arrays{{4, 1}, {16, 1}};
  int o1 = 4;
  int o2 = 1;
  int L = 4;
  int n_psk = 4;
  int nr = 1;
  int trials = 500;
  std::vector<double> snr_db{-10, -5, 0, 5, 10, 15, 20};
  std::uint64_t seed = 1;
  ChannelModel channel;  // geometry-independent part of the channel model
};

struct SePoint {
  double snr_db = 0;
  std::string scheme;  // "type1-<N1>x<N2>" or "type2-<N1>x<N2>"
  double mean_rate = 0;
  double ci95 = 0;
};

struct SeResult {
  std::vector<SePoint> points;
  // Per array and SNR: paired Type II minus Type I difference.
  struct Gap {
    int n1 = 0, n2 = 0;
    double snr_db = 0;
    double mean = 0;
    double ci95 = 0;
  };
  std::vector<Gap> gaps;
};

// Type I: the DFT beam with the largest projected energy. Type II: best of
// the orthogonal groups, OMP over L beams, least-squares weights, 3-bit
// wideband amplitude and N_PSK subband phase, one polarization, one stream.
SeResult spectral_efficiency_experiment(const SeConfig& cfg);

// Single-polarization precoders used by the experiment, one column per unit.
CMat se_type1_precoder(const std::vector<CMat>& h, const ArrayGeometry& g);
CMat se_type2_precoder(const std::vector<CMat>& h, const ArrayGeometry& g, int L, int n_psk);

struct BaselineConfig {
  int users = 4;
  int nr = 1;
  ArrayGeometry geom{4, 1, 4, 1};
  int trials = 200;
  std::vector<double> snr_db{0, 10, 20, 30};
  std::uint64_t seed = 1;
  ChannelModel channel;
};

struct BaselineResult {
  std::vector<SePoint> points;  // scheme names from the MU scheme set
  // Fraction of trials with WMMSE sum rate >= RZF sum rate, per SNR.
  std::vector<std::pair<double, double>> wmmse_wins;
};

BaselineResult baselines_experiment(const BaselineConfig& cfg);

void write_points_csv(std::ostream& os, const std::vector<SePoint>& pts);

}  // namespace nrcb

#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nrcb/type2_r16.hpp"

namespace nrcb {

struct R17Params {
  int M = 1;
  Ratio alpha;
  Ratio beta;
};

// paraCombination 1..8.
const R17Params& r17_params(int combination);

struct R17Config {
  int p_csirs = 32;
  int param_combination = 5;
  int n_threshold = 4;  // tap window bound N, 2 or 4
  int n3 = 18;
  int rank = 1;

  int M() const { return r17_params(param_combination).M; }
  // Number of selected ports K1 = alpha * P, shared by both polarizations.
  int k1() const;
  int L() const { return k1() / 2; }
  int ports() const { return p_csirs; }
};

struct R17Layer {
  std::vector<std::vector<int>> bitmap;  // [K1][M]
  int i18 = 0;                           // K1 * f* + i*
  int k1[2] = {15, 15};
  std::vector<std::vector<int>> k2;      // [K1][M]
  std::vector<std::vector<int>> c;       // [K1][M]
  bool operator==(const R17Layer& o) const {
    return bitmap == o.bitmap && i18 == o.i18 && k1[0] == o.k1[0] && k1[1] == o.k1[1] &&
           k2 == o.k2 && c == o.c;
  }
};

struct R17Pmi {
  std::optional<u64> i12;  // absent when alpha = 1
  std::optional<int> i16;  // present only for M = 2, N = 4
  std::vector<R17Layer> layers;
  bool operator==(const R17Pmi&) const = default;
};

void validate_config(const R17Config& cfg);
int r17_k0(const R17Config& cfg);

// Selected port indices m^(0..L-1) within one polarization.
std::vector<int> decode_ports(std::optional<u64> i12, const R17Config& cfg);
u64 encode_ports(const std::vector<int>& ports, const R17Config& cfg);
// Selected taps {0} or {0, n^(1)}.
std::vector<int> decode_tap_offset(std::optional<int> i16, const R17Config& cfg);

std::optional<std::string> validate_budget(const R17Pmi& pmi, const R17Config& cfg);
void validate_pmi(const R17Config& cfg, const R17Pmi& pmi);

std::vector<CVec> r17_basis(const R17Config& cfg, const R17Pmi& pmi);
cd r17_coefficient(const R17Layer& layer, int L, int i, int f);

CMat reconstruct(const R17Config& cfg, const R17Pmi& pmi, int t);

R17Pmi random_pmi(const R17Config& cfg, std::mt19937_64& rng);

}  // namespace nrcb

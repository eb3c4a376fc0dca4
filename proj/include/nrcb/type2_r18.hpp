#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nrcb/type2_r16.hpp"

namespace nrcb {

// paramCombination-Doppler 1..9.
const R16Params& r18_params(int combination);

struct R18Config {
  ArrayGeometry geom;
  int param_combination = 5;
  int r = 1;
  int n3 = 18;
  int n4 = 4;
  int d_slots = 1;           // slots per interval; report metadata only
  int rank = 1;
  unsigned ri_restriction = 0xF;  // bits r3..r0, bit i allows rank i+1

  static constexpr int q = 2;
  int L() const { return r18_params(param_combination).L; }
  // Shifts actually carried by the report: one when n4 = 1.
  int q_eff() const { return n4 == 1 ? 1 : q; }
  int ports() const { return geom.ports(); }
};

struct R18Layer {
  u64 i16 = 0;
  std::optional<int> i110;                           // absent when n4 = 1
  std::vector<std::vector<std::vector<int>>> bitmap; // [tau][2L][Mv]
  int i18 = 0;
  int k1[2] = {15, 15};
  std::vector<std::vector<std::vector<int>>> k2;     // [tau][2L][Mv]
  std::vector<std::vector<std::vector<int>>> c;      // [tau][2L][Mv]
  bool operator==(const R18Layer& o) const {
    return i16 == o.i16 && i110 == o.i110 && bitmap == o.bitmap && i18 == o.i18 &&
           k1[0] == o.k1[0] && k1[1] == o.k1[1] && k2 == o.k2 && c == o.c;
  }
};

struct R18Pmi {
  int q1 = 0;
  int q2 = 0;
  u64 i12 = 0;
  std::optional<int> i15;
  std::vector<R18Layer> layers;
  bool operator==(const R18Pmi&) const = default;
};

// Same Mv and K0 machinery as the frequency-only codebook.
R16Config r16_view(const R18Config& cfg);
int compute_mv(const R18Config& cfg, int rank);
int r18_k0(const R18Config& cfg);

void validate_config(const R18Config& cfg);
bool check_ri_restriction(unsigned bits, int rank);

// Doppler shifts (0, i110 + 1), or (0) when n4 = 1.
std::vector<int> decode_shifts(std::optional<int> i110, int n4);

std::optional<std::string> validate_budget(const R18Pmi& pmi, const R18Config& cfg);
void validate_pmi(const R18Config& cfg, const R18Pmi& pmi);
std::vector<std::vector<int>> decode_taps(const R18Pmi& pmi, const R18Config& cfg);

// Tap-0 bitmap bits in the concatenated (tau, i) order.
std::vector<int> tap0_column(const R18Layer& layer);
cd r18_coefficient(const R18Layer& layer, int L, int tau, int i, int f);

CMat reconstruct(const R18Config& cfg, const R18Pmi& pmi, int t, int iota);

R18Pmi random_pmi(const R18Config& cfg, std::mt19937_64& rng);
// The same coefficient set carried in the Doppler report format with one shift.
R18Pmi embed_r16(const R16Pmi& pmi);

}  // namespace nrcb

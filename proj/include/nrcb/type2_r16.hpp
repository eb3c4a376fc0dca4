#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nrcb/type2_r15.hpp"

namespace nrcb {

struct Ratio {
  int num = 0;
  int den = 1;
  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const Ratio&) const = default;
};

// ceil(r * n / div) evaluated exactly.
int ceil_ratio(Ratio r, long long n, long long div = 1);

struct R16Params {
  int L = 0;
  Ratio pv_low;   // ranks 1-2
  Ratio pv_high;  // ranks 3-4; num == 0 when those ranks are not allowed
  Ratio beta;
};

// paramCombination 1..8.
const R16Params& r16_params(int combination);

struct R16Config {
  CodebookVariant variant = CodebookVariant::Regular;
  ArrayGeometry geom;  // regular
  int p_csirs = 0;     // port selection
  int d = 1;           // port selection
  int param_combination = 5;
  int r = 1;
  int n3 = 18;
  int rank = 1;

  int L() const { return r16_params(param_combination).L; }
  int ports() const { return variant == CodebookVariant::Regular ? geom.ports() : p_csirs; }
};

struct R16Layer {
  u64 i16 = 0;                          // tap combination
  std::vector<std::vector<int>> bitmap; // i17: [2L][Mv], 0 or 1
  int i18 = 0;                          // strongest indicator
  int k1[2] = {15, 15};                 // i23: wideband amplitude per polarization
  std::vector<std::vector<int>> k2;     // i24: [2L][Mv]
  std::vector<std::vector<int>> c;      // i25: [2L][Mv]
  bool operator==(const R16Layer& o) const {
    return i16 == o.i16 && bitmap == o.bitmap && i18 == o.i18 && k1[0] == o.k1[0] &&
           k1[1] == o.k1[1] && k2 == o.k2 && c == o.c;
  }
};

struct R16Pmi {
  int q1 = 0;            // regular: i11 as (q1,q2)
  int q2 = 0;
  u64 i12 = 0;           // regular beam combination
  int i11 = 0;           // port-selection start index
  std::optional<int> i15;  // present iff n3 > 19
  std::vector<R16Layer> layers;
  bool operator==(const R16Pmi&) const = default;
};

// n3 = r * ceil(rbs / subband_size) with the size compatible with the BWP.
int derive_n3(int bwp_rbs, int subband_size, int r);
int compute_mv(const R16Config& cfg, int rank);
int r16_k0(const R16Config& cfg);

void validate_config(const R16Config& cfg);

// Tap indices n^(0..Mv-1) for a tap combination index; m_initial is used
// only when n3 > 19. Throws FormatError when the index is out of range.
std::vector<int> decode_taps(u64 i16, int n3, int mv, int m_initial = 0);
// Inverse of decode_taps; taps must begin with 0 and increase.
u64 encode_taps(const std::vector<int>& taps, int n3, int mv, int m_initial = 0);
u64 tap_combination_count(int n3, int mv);
int m_initial_from_i15(int i15, int mv);
int i15_from_m_initial(int m_initial, int mv);
// Taps used by every layer of a report.
std::vector<std::vector<int>> decode_taps(const R16Pmi& pmi, const R16Config& cfg);

// (n - taps[strongest]) mod n3 for every tap.
std::vector<int> remap_taps(const std::vector<int>& taps, int strongest, int n3);
// Position f moves to (f - strongest) mod size.
template <class T>
std::vector<T> remap_positions(const std::vector<T>& v, int strongest) {
  const int n = static_cast<int>(v.size());
  std::vector<T> out(v.size());
  for (int f = 0; f < n; ++f) out[((f - strongest) % n + n) % n] = v[f];
  return out;
}

// i18 for a strongest beam i* given the tap-0 bitmap column (rank 1) or
// directly (rank > 1), and its inverse.
int strongest_indicator(const std::vector<int>& tap0_column, int i_star, int rank);
int strongest_from_indicator(const std::vector<int>& tap0_column, int i18, int rank);

// Empty when the nonzero counts respect K0 per layer and 2K0 in total.
std::optional<std::string> validate_budget(const R16Pmi& pmi, const R16Config& cfg);

void validate_pmi(const R16Config& cfg, const R16Pmi& pmi);

// Spatial basis of the L selected beams or ports (one polarization).
std::vector<CVec> r16_basis(const R16Config& cfg, const R16Pmi& pmi);
// Complex coefficient p1*p2*phi of beam i on tap f, zero outside the bitmap.
cd r16_coefficient(const R16Layer& layer, int L, int i, int f);

CMat reconstruct(const R16Config& cfg, const R16Pmi& pmi, int t);

// A uniformly drawn valid report for the configuration.
R16Pmi random_pmi(const R16Config& cfg, std::mt19937_64& rng);

// Shared with the later releases: the strongest amplitude defaults and the
// bitmap consistency of one coefficient block.
void check_coefficients(const std::vector<std::vector<int>>& bitmap,
                        const std::vector<std::vector<int>>& k2,
                        const std::vector<std::vector<int>>& c, int rows, int cols,
                        const char* who);

}  // namespace nrcb

#pragma once

#include <bitset>
#include <random>
#include <utility>
#include <vector>

#include "nrcb/bases.hpp"

namespace nrcb {

struct Type1Config {
  ArrayGeometry geom;
  int mode = 1;
  int rank = 1;
  int subband_count = 1;
};

struct Type1Pmi {
  int i11 = 0;
  int i12 = 0;
  int i13 = 0;           // rank 2 only
  std::vector<int> i2;   // one entry per subband
  bool operator==(const Type1Pmi&) const = default;
};

struct Type1Restriction {
  std::vector<bool> beams;  // N1O1*N2O2 bits, bit N2O2*l + m; empty means unrestricted
  std::bitset<8> ranks = std::bitset<8>().set();
};

void validate_config(const Type1Config& cfg);
void validate_pmi(const Type1Config& cfg, const Type1Pmi& pmi);

// (k1,k2) beam offset of the second rank-2 layer.
std::pair<int, int> k_offsets(int i13, const ArrayGeometry& geom);
int i13_count(const ArrayGeometry& geom);
int i11_count(const Type1Config& cfg);
int i12_count(const Type1Config& cfg);
int i2_count(const Type1Config& cfg);

struct Type1Selection {
  int l = 0;
  int m = 0;
  int n = 0;  // co-phasing index
};
Type1Selection resolve_beam(const Type1Config& cfg, const Type1Pmi& pmi, int subband);

// Beams (l,m) touched by the precoder on a subband.
std::vector<std::pair<int, int>> type1_beams(const Type1Config& cfg, const Type1Pmi& pmi,
                                             int subband);

CMat build_rank1(const Type1Config& cfg, const Type1Pmi& pmi, int subband);
CMat build_rank2(const Type1Config& cfg, const Type1Pmi& pmi, int subband);
CMat build_type1(const Type1Config& cfg, const Type1Pmi& pmi, int subband);
// Same as build_type1 but raises RestrictionError on masked beams or ranks.
CMat build_type1(const Type1Config& cfg, const Type1Pmi& pmi, int subband,
                 const Type1Restriction& restriction);

bool check_beam_restriction(const std::vector<bool>& bits, const Type1Config& cfg,
                            const Type1Pmi& pmi);
bool check_rank_restriction(const std::bitset<8>& r, int rank);

Type1Pmi random_pmi(const Type1Config& cfg, std::mt19937_64& rng);

// Exhaustive scan for the PMI maximizing the summed single-user rate over
// all channels; channels[m] belongs to subband m*subband_count/size.
Type1Pmi search_type1(const std::vector<CMat>& channels, const Type1Config& cfg,
                      const Type1Restriction& restriction = {}, double noise_var = 1.0);

}  // namespace nrcb

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace nrcb {

using u64 = std::uint64_t;

// x choose y, and zero whenever x < y. Throws std::overflow_error when the
// result does not fit in 64 bits.
u64 binomial(u64 x, u64 y);

// Largest-first combinatorial decode: subset S (strictly increasing, values
// in [0,n)) with sum_i C(n-1-S[i], k-i) == index.
std::vector<int> decode_combination(u64 index, int n, int k);
// Inverse of decode_combination. Throws DomainError on malformed subsets.
u64 encode_combination(const std::vector<int>& subset, int n, int k);

// (flat mod n1, flat div n1); n2 bounds the flat index when positive.
std::pair<int, int> split_beam_index(int flat, int n1, int n2 = 0);

struct BeamGroup {
  int g = 0;
  int r1 = 0;
  int r2 = 0;
};

// Four restricted beam groups addressed by beta1 over an O1*O2 grid.
std::vector<BeamGroup> decode_group_restriction(u64 beta1, int o1, int o2);
u64 encode_group_restriction(const std::vector<int>& groups, int o1, int o2);

}  // namespace nrcb

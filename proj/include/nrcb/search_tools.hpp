#pragma once

#include <vector>

#include "nrcb/common.hpp"

namespace nrcb {

// Greedy orthogonal matching pursuit shared across several target vectors:
// each step adds the allowed atom with the largest residual correlation
// energy, then refits all targets by least squares.
std::vector<int> omp_select(const std::vector<CVec>& atoms, const std::vector<CVec>& targets,
                            int count, const std::vector<bool>& allowed = {});

// Least-squares coefficients of target on the given atoms.
CVec least_squares(const std::vector<CVec>& atoms, const CVec& target);

// Per-channel layer targets H^H u_l, where u_l are the dominant left singular
// vectors of all channels placed side by side. Keeping one combiner for the
// whole stack preserves the relative phase between frequency units.
std::vector<CMat> layer_targets(const std::vector<CMat>& channels, int rank);

// Normalized correlation |a^H b| / (|a||b|).
double correlation(const CVec& a, const CVec& b);

}  // namespace nrcb

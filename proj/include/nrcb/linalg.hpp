#pragma once

#include "nrcb/common.hpp"

namespace nrcb {

struct Svd {
  CMat U;
  RVec s;  // descending
  CMat V;
};

// Singular value decomposition backed by Eigen's Jacobi SVD.
Svd svd(const CMat& a, bool full = false);
// Numerical rank with a relative threshold on the largest singular value.
int numerical_rank(const RVec& s, double rel_tol = 1e-10);
// First r right singular vectors.
CMat dominant_right(const CMat& h, int r);
// First r left singular vectors.
CMat dominant_left(const CMat& h, int r);
// Inverse of a square matrix; throws SingularError when ill-conditioned.
CMat inverse_checked(const CMat& a, const char* who, double rcond_min = 1e-12);
// log2 det of a Hermitian positive definite matrix.
double log2det_hpd(const CMat& a);
// Largest |eigenvalue| of a real square matrix.
double spectral_radius(const RMat& a);

}  // namespace nrcb

#include "nrcb/linalg.hpp"

#include <cmath>
#include <string>

namespace nrcb {

Svd svd(const CMat& a, bool full) {
  const unsigned opts = full ? (Eigen::ComputeFullU | Eigen::ComputeFullV)
                             : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::JacobiSVD<CMat> dec(a, opts);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

int numerical_rank(const RVec& s, double rel_tol) {
  if (s.size() == 0 || s(0) <= 0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

CMat dominant_right(const CMat& h, int r) {
  const Svd d = svd(h, true);
  return d.V.leftCols(r);
}

CMat dominant_left(const CMat& h, int r) {
  const Svd d = svd(h, true);
  return d.U.leftCols(r);
}

CMat inverse_checked(const CMat& a, const char* who, double rcond_min) {
  if (a.rows() != a.cols()) throw DomainError(std::string(who) + ": matrix must be square");
  const RVec s = svd(a).s;
  if (s.size() == 0 || !(s(0) > 0) || s(s.size() - 1) / s(0) < rcond_min)
    throw SingularError(std::string(who) + ": matrix is singular or ill-conditioned");
  return a.partialPivLu().inverse();
}

double log2det_hpd(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  double acc = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (!(ev > 0)) throw DegenerateError("log2det_hpd: matrix is not positive definite");
    acc += std::log2(ev);
  }
  return acc;
}

double spectral_radius(const RMat& a) {
  Eigen::EigenSolver<RMat> es(a, false);
  double r = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
  return r;
}

}  // namespace nrcb

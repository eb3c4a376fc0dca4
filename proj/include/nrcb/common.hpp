#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nrcb {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Index or parameter outside its admissible range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or undecodable report field.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Report fields that contradict each other (bitmap vs coefficients, budgets).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A beam, rank or amplitude forbidden by codebook subset restriction.
class RestrictionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that leaves the requested quantity undefined (zero norm, zero channel).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

}  // namespace nrcb

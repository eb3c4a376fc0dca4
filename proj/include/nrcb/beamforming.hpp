#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nrcb/common.hpp"

namespace nrcb {

enum class SuScheme { SVD, MRT, ZF, RZF, MMSE, GMD };
enum class MuScheme { ZF, RZF, MMSE, EZF, BD, WMMSE };

SuScheme parse_su_scheme(const std::string& name);
MuScheme parse_mu_scheme(const std::string& name);
std::string to_string(SuScheme s);
std::string to_string(MuScheme s);

struct BfParams {
  int streams = 1;                  // SU stream count, MU streams per user
  double xi = 0.0;                  // regularization for RZF and EZF
  double tx_power = 1.0;            // Pt
  double noise_var = 1.0;           // sigma^2 (MMSE and WMMSE)
  int iterations = 100;             // WMMSE iteration cap
  double tolerance = 1e-8;          // WMMSE early stop on rate change
  std::uint64_t seed = 1;           // WMMSE random start
  bool wmmse_rzf_start = true;      // start WMMSE from RZF (xi) when every user takes all its rows
  std::vector<double> priorities;   // WMMSE user weights, default all ones
  bool normalize = true;            // scale Frobenius norm^2 to Pt
};

// log2 det(I + H W W^H H^H / noise_var).
double su_rate(const CMat& h, const CMat& w, double noise_var);

// Per-user rate accumulated over subcarriers. h[m][k] is user k's channel on
// subcarrier m and w[m][k] its beamformer block.
std::vector<double> rate(const std::vector<std::vector<CMat>>& h,
                         const std::vector<std::vector<CMat>>& w,
                         const std::vector<double>& noise_var);

CMat su_beamformer(SuScheme scheme, const CMat& h, const BfParams& p = {});

struct MuBeamformer {
  CMat w;                       // Nt x sum of stream counts
  std::vector<int> offsets;     // first column of each user's block
  std::vector<int> widths;      // column count of each user's block
  std::vector<double> history;  // weighted sum rate per WMMSE iteration
  CMat block(int k) const { return w.middleCols(offsets[k], widths[k]); }
};

MuBeamformer mu_beamformer(MuScheme scheme, const std::vector<CMat>& h, const BfParams& p = {});

// Weighted sum rate of a multi-user beamformer on one subcarrier.
double weighted_sum_rate(const std::vector<CMat>& h, const MuBeamformer& bf,
                         const std::vector<double>& noise_var,
                         const std::vector<double>& priorities);

struct Gmd {
  CMat Q;
  CMat R;
  CMat P;
};
// H = Q R P^H with R upper triangular and all diagonal entries equal to the
// geometric mean of the nonzero singular values.
Gmd gmd(const CMat& h);

// Power allocation. Gains are subchannel SNRs lambda_i^2.
std::vector<double> waterfilling(const std::vector<double>& gains, double total_power);
std::vector<double> harmonic_allocation(const std::vector<double>& gains, double total_power);

struct QosResult {
  std::vector<double> power;
  int iterations = 0;
};
// Fixed point P_i = (gamma_i / G_ii)(sum_{j!=i} P_j G_ij + noise). G holds
// |h_ij|^2 with the direct gains on the diagonal.
QosResult qos_allocation(const RMat& gains, const std::vector<double>& targets, double noise_var,
                         int max_iterations = 100000, double tolerance = 1e-10);
std::vector<double> qos_sinr(const RMat& gains, const std::vector<double>& power,
                             double noise_var);

}  // namespace nrcb

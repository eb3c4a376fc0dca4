#pragma once

#include <array>
#include <vector>

#include "nrcb/type2_r15.hpp"
#include "nrcb/type2_r16.hpp"
#include "nrcb/type2_r17.hpp"
#include "nrcb/type2_r18.hpp"

namespace nrcb {

// Dense third-order tensor, first index fastest.
struct Tensor3 {
  std::array<int, 3> dims{0, 0, 0};
  std::vector<cd> data;

  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : dims{d0, d1, d2}, data(static_cast<size_t>(d0) * d1 * d2) {}
  cd& operator()(int i, int j, int k) { return data[i + dims[0] * (j + static_cast<size_t>(dims[1]) * k)]; }
  cd operator()(int i, int j, int k) const {
    return data[i + dims[0] * (j + static_cast<size_t>(dims[1]) * k)];
  }
  // Frontal slice k as a dims[0] x dims[1] matrix.
  CMat slice(int k) const;
};

// Mode-n product T x_n M (n = 0, 1, 2), replacing dimension n by M.rows().
Tensor3 mode_product(const Tensor3& t, const CMat& m, int mode);

struct CompactFactors {
  CMat ws;      // full spatial basis, P x P, block diagonal over polarizations
  CMat ws_hat;  // selected spatial columns, P x 2L
  CMat wf;      // full spectral basis, N3 x N3
  CMat wf_hat;  // selected taps, N3 x Mv
  CMat wt;      // full temporal basis, N4 x N4
  CMat wt_hat;  // selected shifts, N4 x Q
  Tensor3 core;  // 2L x Mv x Q combining coefficients
  Tensor3 pmi;   // P x N3 x N4 sparse placement of the same coefficients
};

// Single-subband factors; Mv = Q = 1 and the frequency/time factors are 1x1.
CompactFactors factors_r15(const T2R15Config& cfg, const T2R15Pmi& pmi, int layer, int subband);
CompactFactors factors_r16(const R16Config& cfg, const R16Pmi& pmi, int layer);
CompactFactors factors_r17(const R17Config& cfg, const R17Pmi& pmi, int layer);
CompactFactors factors_r18(const R18Config& cfg, const R18Pmi& pmi, int layer);

struct CompactForms {
  CMat effective;  // built from the selected bases
  CMat full;       // built from the full bases and the sparse placement
};

// Precoding vector ws_hat * w_c and ws * w_PMI.
CompactForms compact_r15(const CompactFactors& f);
// P x N3 matrices ws_hat * W_c * wf_hat^T and ws * W_PMI * wf^T.
CompactForms compact_r16(const CompactFactors& f);

struct TuckerForms {
  Tensor3 effective;        // core x1 ws_hat x2 wf_hat x3 wt_hat
  Tensor3 full;             // pmi x1 ws x2 wf x3 wt
  CMat flat_effective;      // (wf_hat kron ws_hat) * W_c * wt_hat^T, P*N3 x N4
  CMat flat_full;           // (wf kron ws) * W_PMI * wt^T
};
TuckerForms compact_r18_tucker(const CompactFactors& f);

CMat kron(const CMat& a, const CMat& b);
// Each column scaled to unit norm (zero columns are left unchanged).
CMat normalize_columns(const CMat& m);

}  // namespace nrcb

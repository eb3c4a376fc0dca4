#pragma once

#include <vector>

#include "nrcb/common.hpp"

namespace nrcb {

struct ArrayGeometry {
  int n1 = 2;
  int n2 = 1;
  int o1 = 4;
  int o2 = 1;

  int ports() const { return 2 * n1 * n2; }
  int beams_per_pol() const { return n1 * n2; }
  bool operator==(const ArrayGeometry&) const = default;
};

// All (N1,N2)/(O1,O2) pairs a CSI-RS resource may be configured with.
const std::vector<ArrayGeometry>& supported_geometries();
bool is_supported(const ArrayGeometry& geom);
// Throws DomainError for geometries outside the supported set.
void validate_geometry(const ArrayGeometry& geom);

// e^{j 2 pi num / den}, exact at multiples of a quarter turn.
cd unit_phase(long long num, long long den);

// Oversampled 2-D DFT beam v_{l,m}; the vertical index runs fastest.
CVec dft_beam(const ArrayGeometry& geom, int l, int m);
// Same beam with indices taken modulo the oversampled grid.
CVec dft_beam_wrapped(const ArrayGeometry& geom, long long l, long long m);

// The N1*N2 mutually orthogonal beams sharing offsets (q1,q2); beam (i,j)
// sits at position i*N2 + j of the result.
std::vector<CVec> orthogonal_group(const ArrayGeometry& geom, int q1, int q2);

// Delay-domain basis entry t = e^{j 2 pi t idx / n3}.
CVec spectral_basis(int n3, int idx);
// Doppler-domain basis entry iota = e^{j 2 pi iota idx / n4}.
CVec temporal_basis(int n4, int idx);
// Unit vector of length p_csirs/2 with a one at d_index.
RVec port_selection_basis(int p_csirs, int d_index);

bool is_valid_port_count(int p_csirs);

}  // namespace nrcb

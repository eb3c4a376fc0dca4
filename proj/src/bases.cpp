#include "nrcb/bases.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nrcb {

const std::vector<ArrayGeometry>& supported_geometries() {
  static const std::vector<ArrayGeometry> table = {
      {2, 1, 4, 1},  {2, 2, 4, 4}, {4, 1, 4, 1}, {3, 2, 4, 4},
      {6, 1, 4, 1},  {4, 2, 4, 4}, {8, 1, 4, 1}, {4, 3, 4, 4},
      {6, 2, 4, 4},  {12, 1, 4, 1}, {4, 4, 4, 4}, {8, 2, 4, 4},
      {16, 1, 4, 1},
  };
  return table;
}

bool is_supported(const ArrayGeometry& geom) {
  for (const auto& g : supported_geometries())
    if (g == geom) return true;
  return false;
}

void validate_geometry(const ArrayGeometry& geom) {
  if (!is_supported(geom))
    throw DomainError("unsupported array geometry (" + std::to_string(geom.n1) + "," +
                      std::to_string(geom.n2) + ")/(" + std::to_string(geom.o1) + "," +
                      std::to_string(geom.o2) + ")");
}

bool is_valid_port_count(int p) {
  return p == 4 || p == 8 || p == 12 || p == 16 || p == 24 || p == 32;
}

cd unit_phase(long long num, long long den) {
  if (den <= 0) throw DomainError("unit_phase: denominator must be positive");
  long long r = num % den;
  if (r < 0) r += den;
  if ((4 * r) % den == 0) {
    switch ((4 * r) / den) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

CVec dft_beam_wrapped(const ArrayGeometry& geom, long long l, long long m) {
  const long long gh = static_cast<long long>(geom.n1) * geom.o1;
  const long long gv = static_cast<long long>(geom.n2) * geom.o2;
  CVec v(geom.n1 * geom.n2);
  for (int i = 0; i < geom.n1; ++i)
    for (int k = 0; k < geom.n2; ++k)
      v(i * geom.n2 + k) = unit_phase(l * i, gh) * unit_phase(m * k, gv);
  return v;
}

CVec dft_beam(const ArrayGeometry& geom, int l, int m) {
  if (l < 0 || l >= geom.n1 * geom.o1 || m < 0 || m >= geom.n2 * geom.o2)
    throw DomainError("dft_beam: index (" + std::to_string(l) + "," + std::to_string(m) +
                      ") outside the oversampled grid");
  return dft_beam_wrapped(geom, l, m);
}

std::vector<CVec> orthogonal_group(const ArrayGeometry& geom, int q1, int q2) {
  if (q1 < 0 || q1 >= geom.o1 || q2 < 0 || q2 >= geom.o2)
    throw DomainError("orthogonal_group: offset outside [0,O1)x[0,O2)");
  std::vector<CVec> group;
  group.reserve(geom.n1 * geom.n2);
  for (int i = 0; i < geom.n1; ++i)
    for (int j = 0; j < geom.n2; ++j)
      group.push_back(dft_beam(geom, geom.o1 * i + q1, geom.o2 * j + q2));
  return group;
}

namespace {
CVec dft_column(int n, int idx, const char* who) {
  if (n <= 0 || idx < 0 || idx >= n)
    throw DomainError(std::string(who) + ": index outside [0," + std::to_string(n) + ")");
  CVec v(n);
  for (int t = 0; t < n; ++t) v(t) = unit_phase(static_cast<long long>(t) * idx, n);
  return v;
}
}  // namespace

CVec spectral_basis(int n3, int idx) { return dft_column(n3, idx, "spectral_basis"); }
CVec temporal_basis(int n4, int idx) { return dft_column(n4, idx, "temporal_basis"); }

RVec port_selection_basis(int p_csirs, int d_index) {
  if (!is_valid_port_count(p_csirs))
    throw DomainError("port_selection_basis: unsupported port count");
  if (d_index < 0 || d_index >= p_csirs / 2)
    throw DomainError("port_selection_basis: port index outside [0,P/2)");
  RVec v = RVec::Zero(p_csirs / 2);
  v(d_index) = 1.0;
  return v;
}

}  // namespace nrcb

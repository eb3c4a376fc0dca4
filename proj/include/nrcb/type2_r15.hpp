#pragma once

#include <random>
#include <utility>
#include <vector>

#include "nrcb/bases.hpp"
#include "nrcb/combinadics.hpp"

namespace nrcb {

enum class CodebookVariant { Regular, PortSelection };

struct T2R15Config {
  ArrayGeometry geom;          // regular variant
  int L = 4;
  int n_psk = 8;
  bool subband_amplitude = false;
  int rank = 1;
  int subband_count = 1;
  CodebookVariant variant = CodebookVariant::Regular;
  int p_csirs = 0;             // port-selection variant
  int d = 1;                   // port-selection sampling interval

  int ports() const { return variant == CodebookVariant::Regular ? geom.ports() : p_csirs; }
};

struct T2R15Layer {
  int i13 = 0;                          // strongest coefficient, 0..2L-1
  std::vector<int> k1;                  // 2L wideband amplitude indices
  std::vector<std::vector<int>> k2;     // [subband][2L] subband amplitude indices
  std::vector<std::vector<int>> c;      // [subband][2L] phase indices
  bool operator==(const T2R15Layer&) const = default;
};

struct T2R15Pmi {
  int q1 = 0;
  int q2 = 0;
  u64 i12 = 0;
  int i11 = 0;  // port-selection starting index
  std::vector<T2R15Layer> layers;
  bool operator==(const T2R15Pmi&) const = default;
};

// Maximum number of reported subband amplitudes per layer.
int k2_limit(int L);

void validate_config(const T2R15Config& cfg);
// Checks ranges, strongest-coefficient defaults and the reporting rules.
void validate_pmi(const T2R15Config& cfg, const T2R15Pmi& pmi);

enum class R15Report {
  Strongest,     // fixed to its defaults and never reported
  AmpAndPhase,   // subband amplitude and N_PSK phase reported
  Phase,         // N_PSK phase reported, subband amplitude fixed to 1
  CoarsePhase,   // phase from the 4-point alphabet, subband amplitude fixed to 1
  None           // zero wideband amplitude
};

// Classification of the 2L coefficients of each layer.
std::vector<std::vector<R15Report>> reporting_mask(const T2R15Config& cfg, const T2R15Pmi& pmi);

// Spatial basis vectors (length N1N2 regular, P/2 port selection) of the L
// selected beams or ports shared by both polarizations.
std::vector<CVec> r15_basis(const T2R15Config& cfg, const T2R15Pmi& pmi);
// Beam grid coordinates (l,m) of the selected beams (regular variant only).
std::vector<std::pair<int, int>> r15_beam_coords(const T2R15Config& cfg, const T2R15Pmi& pmi);

// Complex combining coefficient p1*p2*phi of every beam on a subband.
std::vector<cd> r15_coefficients(const T2R15Config& cfg, const T2R15Pmi& pmi, int layer,
                                 int subband);

CMat reconstruct(const T2R15Config& cfg, const T2R15Pmi& pmi, int subband);

// Dual-polarized combination [sum_i a_i b_i ; sum_i a_{i+L} b_i] scaled to unit
// norm, with basis vectors b_i of common squared norm basis_energy and
// mutually orthogonal. Throws DegenerateError when every coefficient is zero.
CVec combine_beams(const std::vector<CVec>& basis, const std::vector<cd>& coef,
                   double basis_energy);

struct R15AmpCaps {
  std::vector<BeamGroup> groups;
  std::vector<double> cap;  // per grid beam, index N2O2*l + m
  double for_beam(const ArrayGeometry& geom, int l, int m) const {
    return cap[static_cast<size_t>(geom.n2 * geom.o2) * l + m];
  }
};

// Decodes B1 (11 bits, first bit most significant) and B2 (four blocks of
// 2N1N2 bits, each block in the same most-significant-first order) into
// per-beam maximum wideband amplitudes of the groups
// {v(N1 r1 + x1, N2 r2 + x2)}.
R15AmpCaps subset_restriction(const std::vector<bool>& b1, const std::vector<bool>& b2,
                              const ArrayGeometry& geom);
R15AmpCaps no_restriction(const ArrayGeometry& geom);
bool respects_restriction(const T2R15Config& cfg, const T2R15Pmi& pmi, const R15AmpCaps& caps);

// A uniformly drawn report that follows the reporting rules.
T2R15Pmi random_pmi(const T2R15Config& cfg, std::mt19937_64& rng);

// Energy of the L strongest beams of an orthogonal group summed over targets.
// Every group is a complete basis, so the whole-group energy cannot rank them.
double group_score(const std::vector<CVec>& group, const std::vector<CVec>& targets, int L);
// Orthogonal group (q1,q2) with the largest group_score. Near-ties, common
// when L covers a whole grid row, go to the group holding the strongest beam.
std::pair<int, int> best_group(const ArrayGeometry& geom, const std::vector<CVec>& targets, int L);
// best_group first, then every other group whose score ties with it.
std::vector<std::pair<int, int>> tied_groups(const ArrayGeometry& geom, const std::vector<CVec>& targets,
                                             int L);

// Group selection by projected energy, OMP beam selection, least-squares
// combining and quantization. channels[m] belongs to subband
// m*subband_count/size.
T2R15Pmi search_t2_r15(const std::vector<CMat>& channels, const T2R15Config& cfg,
                       const R15AmpCaps* caps = nullptr);

}  // namespace nrcb

#pragma once

#include "nrcb/common.hpp"

namespace nrcb {

// Dequantizers. Each throws DomainError outside its index range.
double amp_r15_wideband(int k);  // k in 0..7
double amp_r15_subband(int k);   // k in 0..1
double amp_r16_wideband(int k);  // k in 1..15; 0 is reserved
double amp_r16_subband(int k);   // k in 0..7
cd phase(int c, int n_psk);      // n_psk in {4,8,16}
double max_amp_restriction(int two_bits);

// Nearest-level quantizers working in the log-amplitude domain. A value far
// below the smallest nonzero level maps to the zero level where one exists.
int quantize_r15_wideband(double amp);
int quantize_r15_subband(double amp);
int quantize_r16_wideband(double amp);
int quantize_r16_subband(double amp);
int quantize_phase(cd z, int n_psk);

bool is_valid_psk(int n_psk);

}  // namespace nrcb

#include "nrcb/quantization.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nrcb/bases.hpp"

namespace nrcb {

namespace {
void check(int k, int lo, int hi, const char* who) {
  if (k < lo || k > hi)
    throw DomainError(std::string(who) + ": index " + std::to_string(k) + " outside [" +
                      std::to_string(lo) + "," + std::to_string(hi) + "]");
}

// Index of the level closest to amp in log2 scale among levels k in [lo,hi].
template <class F>
int nearest_log(double amp, int lo, int hi, F level) {
  const double la = std::log2(amp);
  int best = lo;
  double best_d = INFINITY;
  for (int k = lo; k <= hi; ++k) {
    const double d = std::abs(std::log2(level(k)) - la);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}
}  // namespace

bool is_valid_psk(int n_psk) { return n_psk == 4 || n_psk == 8 || n_psk == 16; }

double amp_r15_wideband(int k) {
  check(k, 0, 7, "amp_r15_wideband");
  return k == 0 ? 0.0 : std::exp2((k - 7) / 2.0);
}

double amp_r15_subband(int k) {
  check(k, 0, 1, "amp_r15_subband");
  return k == 0 ? std::sqrt(0.5) : 1.0;
}

double amp_r16_wideband(int k) {
  if (k == 0) throw DomainError("amp_r16_wideband: index 0 is reserved");
  check(k, 1, 15, "amp_r16_wideband");
  return std::exp2(-(15 - k) / 4.0);
}

double amp_r16_subband(int k) {
  check(k, 0, 7, "amp_r16_subband");
  return std::exp2(-(7 - k) / 2.0);
}

cd phase(int c, int n_psk) {
  if (!is_valid_psk(n_psk)) throw DomainError("phase: n_psk must be 4, 8 or 16");
  check(c, 0, n_psk - 1, "phase");
  return unit_phase(c, n_psk);
}

double max_amp_restriction(int two_bits) {
  check(two_bits, 0, 3, "max_amp_restriction");
  static const double table[4] = {0.0, 0.5, std::sqrt(0.5), 1.0};
  return table[two_bits];
}

int quantize_r15_wideband(double amp) {
  // Zero level chosen below half the smallest nonzero level in log terms.
  if (!(amp > amp_r15_wideband(1) / std::sqrt(2.0))) return 0;
  return nearest_log(amp, 1, 7, amp_r15_wideband);
}

int quantize_r15_subband(double amp) {
  if (!(amp > 0)) return 0;
  return nearest_log(amp, 0, 1, amp_r15_subband);
}

int quantize_r16_wideband(double amp) {
  if (!(amp > 0)) return 1;
  return nearest_log(amp, 1, 15, amp_r16_wideband);
}

int quantize_r16_subband(double amp) {
  if (!(amp > 0)) return 0;
  return nearest_log(amp, 0, 7, amp_r16_subband);
}

int quantize_phase(cd z, int n_psk) {
  if (!is_valid_psk(n_psk)) throw DomainError("quantize_phase: n_psk must be 4, 8 or 16");
  double a = std::arg(z);
  if (a < 0) a += 2.0 * std::numbers::pi;
  const int c = static_cast<int>(std::lround(a * n_psk / (2.0 * std::numbers::pi)));
  return c % n_psk;
}

}  // namespace nrcb

#include "nrcb/combinadics.hpp"

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "nrcb/common.hpp"

namespace nrcb {

u64 binomial(u64 x, u64 y) {
  if (y > x) return 0;
  if (y > x - y) y = x - y;
  u64 result = 1;
  for (u64 i = 1; i <= y; ++i) {
    // result * (x - y + i) / i stays integral at every step.
    const u64 num = x - y + i;
    const u64 g = std::gcd(result, i);
    const u64 a = result / g;
    const u64 b = i / g;
    const u64 c = num / b;  // b divides num once a is reduced
    if (c != 0 && a > UINT64_MAX / c) throw std::overflow_error("binomial: 64-bit overflow");
    result = a * c;
  }
  return result;
}

std::vector<int> decode_combination(u64 index, int n, int k) {
  if (n < 0 || k < 0 || k > n) throw DomainError("decode_combination: need 0 <= k <= n");
  if (index >= binomial(n, k))
    throw DomainError("decode_combination: index " + std::to_string(index) +
                      " outside [0,C(n,k))");
  std::vector<int> subset(k);
  u64 s = 0;
  for (int i = 0; i < k; ++i) {
    int best = -1;
    for (int x = n - 1 - i; x >= k - 1 - i; --x) {
      if (index - s >= binomial(x, k - i)) {
        best = x;
        break;
      }
    }
    if (best < 0) throw FormatError("decode_combination: no admissible x*");
    s += binomial(best, k - i);
    subset[i] = n - 1 - best;
  }
  return subset;
}

u64 encode_combination(const std::vector<int>& subset, int n, int k) {
  if (k < 0 || k > n || static_cast<int>(subset.size()) != k)
    throw DomainError("encode_combination: subset length must equal k <= n");
  u64 idx = 0;
  for (int i = 0; i < k; ++i) {
    if (subset[i] < 0 || subset[i] >= n)
      throw DomainError("encode_combination: element outside [0,n)");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw DomainError("encode_combination: subset must be strictly increasing");
    idx += binomial(n - 1 - subset[i], k - i);
  }
  return idx;
}

std::pair<int, int> split_beam_index(int flat, int n1, int n2) {
  if (n1 <= 0 || flat < 0 || (n2 > 0 && flat >= n1 * n2))
    throw DomainError("split_beam_index: flat index out of range");
  const int a = flat % n1;
  return {a, (flat - a) / n1};
}

std::vector<BeamGroup> decode_group_restriction(u64 beta1, int o1, int o2) {
  const int n = o1 * o2;
  if (o1 <= 0 || o2 <= 0 || n < 4)
    throw DomainError("decode_group_restriction: O1*O2 must be at least 4");
  if (beta1 >= binomial(n, 4))
    throw DomainError("decode_group_restriction: beta1 outside [0,C(O1O2,4))");
  std::vector<BeamGroup> out;
  for (int g : decode_combination(beta1, n, 4)) {
    const int r1 = g % o1;
    out.push_back({g, r1, (g - r1) / o1});
  }
  return out;
}

u64 encode_group_restriction(const std::vector<int>& groups, int o1, int o2) {
  const int n = o1 * o2;
  if (o1 <= 0 || o2 <= 0 || n < 4)
    throw DomainError("encode_group_restriction: O1*O2 must be at least 4");
  return encode_combination(groups, n, 4);
}

}  // namespace nrcb

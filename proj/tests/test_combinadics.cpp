#include <algorithm>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "nrcb/combinadics.hpp"
#include "nrcb/common.hpp"

using namespace nrcb;

namespace {

// All k-subsets of [0,n) in decreasing lexicographic order of their reversed
// largest-first form, which is the order the decoder assigns indices in.
std::vector<std::vector<int>> brute_force(int n, int k) {
  std::vector<std::vector<int>> all;
  std::vector<int> mask(n, 0);
  std::fill(mask.end() - k, mask.end(), 1);
  do {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    all.push_back(s);
  } while (std::next_permutation(mask.begin(), mask.end()));
  return all;
}

u64 slow_binomial(int x, int y) {
  if (y > x) return 0;
  return static_cast<u64>(brute_force(x, y).size());
}

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(4, 2) == 6);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(16, 4) == 1820);
  CHECK(binomial(0, 0) == 1);
  for (int x = 0; x <= 12; ++x)
    for (int y = 0; y <= 12; ++y) CHECK(binomial(x, y) == slow_binomial(x, y));
  CHECK(binomial(64, 32) == 1832624140942590534ULL);
  CHECK_THROWS_AS(binomial(200, 100), std::overflow_error);
}

TEST_CASE("decode and encode examples") {
  CHECK(decode_combination(0, 4, 2) == std::vector<int>{2, 3});
  CHECK(decode_combination(5, 4, 2) == std::vector<int>{0, 1});
  CHECK(decode_combination(4, 5, 1) == std::vector<int>{0});
  CHECK(encode_combination({2, 3}, 4, 2) == 0);
  CHECK(encode_combination({0, 1}, 4, 2) == 5);
  CHECK(encode_combination({0}, 5, 1) == 4);
  CHECK_THROWS_AS(encode_combination({1, 1}, 4, 2), DomainError);
  CHECK_THROWS_AS(encode_combination({0, 4}, 4, 2), DomainError);
  CHECK_THROWS_AS(encode_combination({0}, 4, 2), DomainError);
  CHECK_THROWS(decode_combination(6, 4, 2));
}

TEST_CASE("bijection against brute-force enumeration") {
  for (int n = 1; n <= 12; ++n)
    for (int k = 0; k <= std::min(n, 6); ++k) {
      const auto all = brute_force(n, k);
      REQUIRE(all.size() == binomial(n, k));
      std::vector<bool> seen(all.size(), false);
      for (const auto& s : all) {
        u64 sum = 0;
        for (int i = 0; i < k; ++i) sum += binomial(n - 1 - s[i], k - i);
        const u64 idx = encode_combination(s, n, k);
        CHECK(idx == sum);
        REQUIRE(idx < all.size());
        CHECK_FALSE(seen[idx]);
        seen[idx] = true;
        CHECK(decode_combination(idx, n, k) == s);
      }
      for (u64 i = 0; i < all.size(); ++i) {
        const auto s = decode_combination(i, n, k);
        CHECK(std::is_sorted(s.begin(), s.end()));
        CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
        CHECK(encode_combination(s, n, k) == i);
      }
      std::vector<int> top(k), bottom(k);
      for (int i = 0; i < k; ++i) {
        top[i] = n - k + i;
        bottom[i] = i;
      }
      CHECK(decode_combination(0, n, k) == top);
      CHECK(decode_combination(binomial(n, k) - 1, n, k) == bottom);
    }
}

TEST_CASE("split_beam_index") {
  CHECK(split_beam_index(0, 4) == std::pair<int, int>{0, 0});
  CHECK(split_beam_index(5, 4) == std::pair<int, int>{1, 1});
  CHECK(split_beam_index(7, 2) == std::pair<int, int>{1, 3});
  CHECK_THROWS_AS(split_beam_index(8, 4, 2), DomainError);
}

TEST_CASE("group restriction examples") {
  const auto g4 = decode_group_restriction(0, 2, 2);
  REQUIRE(g4.size() == 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(g4[k].g == k);
    CHECK(g4[k].r1 == k % 2);
    CHECK(g4[k].r2 == k / 2);
  }
  CHECK(encode_group_restriction({0, 1, 2, 3}, 4, 4) == 1819);
  const auto g16 = decode_group_restriction(1819, 4, 4);
  for (int k = 0; k < 4; ++k) CHECK(g16[k].g == k);
  CHECK_THROWS_AS(decode_group_restriction(0, 1, 2), DomainError);
  CHECK_THROWS(decode_group_restriction(1820, 4, 4));
}

TEST_CASE("group restriction roundtrip over every subset") {
  for (auto [o1, o2] : {std::pair{4, 4}, std::pair{4, 1}, std::pair{2, 2}}) {
    const int n = o1 * o2;
    for (const auto& s : brute_force(n, 4)) {
      u64 sum = 0;
      for (int k = 0; k < 4; ++k) sum += binomial(n - 1 - s[k], 4 - k);
      const u64 beta = encode_group_restriction(s, o1, o2);
      CHECK(beta == sum);
      const auto g = decode_group_restriction(beta, o1, o2);
      for (int k = 0; k < 4; ++k) {
        CHECK(g[k].g == s[k]);
        CHECK(g[k].r1 == s[k] % o1);
        CHECK(g[k].r2 == s[k] / o1);
      }
    }
  }
}

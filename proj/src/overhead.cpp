#include "nrcb/overhead.hpp"

#include <algorithm>
#include <map>

#include "nrcb/combinadics.hpp"
#include "nrcb/common.hpp"

namespace nrcb {

std::string to_string(Release r) {
  switch (r) {
    case Release::R15Regular: return "r15-type2";
    case Release::R15PortSelection: return "r15-ps";
    case Release::R16Regular: return "r16";
    case Release::R16PortSelection: return "r16-ps";
    case Release::R17PortSelection: return "r17-ps";
    case Release::R18Regular: return "r18";
  }
  return "?";
}

const std::vector<Release>& all_releases() {
  static const std::vector<Release> all{Release::R15Regular,       Release::R15PortSelection,
                                        Release::R16Regular,       Release::R16PortSelection,
                                        Release::R17PortSelection, Release::R18Regular};
  return all;
}

Release parse_release(const std::string& s) {
  for (Release r : all_releases())
    if (to_string(r) == s) return r;
  throw DomainError("unknown release '" + s + "'");
}

OverheadConfig figure_config(int L) {
  OverheadConfig c;
  c.L = L;
  return c;
}

long long ceil_log2(unsigned long long x) {
  long long b = 0;
  while ((1ULL << b) < x) ++b;
  return b;
}

namespace {

bool is_r15(Release r) { return r == Release::R15Regular || r == Release::R15PortSelection; }
bool is_ps(Release r) {
  return r == Release::R15PortSelection || r == Release::R16PortSelection || r == Release::R17PortSelection;
}

void add(BitBudget& b, const std::string& field, long long bits, int layers) {
  if (layers == 0) {
    b.fields.push_back({field, -1, bits});
  } else {
    for (int l = 0; l < layers; ++l) b.fields.push_back({field, l, bits});
  }
}

long long sum(const BitBudget& b) {
  long long s = 0;
  for (const auto& f : b.fields) s += f.bits;
  return s;
}

void check(const OverheadConfig& c) {
  require(c.L >= 1 && c.rank >= 1 && c.mv >= 1 && c.n3 >= 1 && c.n4 >= 1 && c.q >= 1,
          "overhead: counts must be positive");
  require(c.knz >= 2, "overhead: K^NZ must be at least 2");
  require(c.n_psk == 4 || c.n_psk == 8 || c.n_psk == 16, "overhead: N_PSK must be 4, 8 or 16");
}

}  // namespace

BitBudget bits_i1(Release r, const OverheadConfig& c) {
  check(c);
  BitBudget b;
  const int v = c.rank;
  const long long i11_ps = ceil_log2((c.p_csirs + 2 * c.d - 1) / (2 * c.d));
  if (r == Release::R17PortSelection) {
    add(b, "i12", ceil_log2(binomial(c.p_csirs / 2, c.k1 / 2)), 0);
    add(b, "i16", ceil_log2(c.n_threshold - 1), v);
    add(b, "i17", 2LL * c.k1 * c.m, v);
    add(b, "i18", ceil_log2(static_cast<unsigned long long>(c.k1) * c.m), v);
  } else {
    add(b, "i11", is_ps(r) ? i11_ps : ceil_log2(c.o1o2), 0);
    if (!is_ps(r)) add(b, "i12", ceil_log2(binomial(c.n1n2, c.L)), 0);
    if (is_r15(r)) {
      add(b, "i13", ceil_log2(2 * c.L), v);
      add(b, "i14", 3LL * (2 * c.L - 1), v);
    } else {
      if (c.n3 > 19) {
        add(b, "i15", ceil_log2(2 * c.mv), 0);
        add(b, "i16", ceil_log2(binomial(2 * c.mv - 1, c.mv - 1)), v);
      } else {
        add(b, "i16", ceil_log2(binomial(c.n3 - 1, c.mv - 1)), v);
      }
      const int qq = r == Release::R18Regular ? c.q : 1;
      add(b, "i17", 4LL * c.L * c.mv * qq, v);
      add(b, "i18", ceil_log2(2 * c.L * qq), v);
      if (r == Release::R18Regular) add(b, "i110", ceil_log2(c.n4 - 1), v);
    }
  }
  b.i1_bits = sum(b);
  b.total_bits = b.i1_bits;
  return b;
}

BitBudget bits_i2(Release r, const OverheadConfig& c) {
  check(c);
  BitBudget b;
  const int v = c.rank;
  if (is_r15(r)) {
    const long long m = std::min(c.mv, c.k2);
    const long long lp = ceil_log2(c.n_psk);
    add(b, "i21", m * lp - lp + 2 * (c.mv - m), v);
    add(b, "i22", m - 1, v);
  }
  add(b, "i23", 4, v);
  add(b, "i24", 3LL * (c.knz - 2), v);
  add(b, "i25", 4LL * (c.knz - 2), v);
  b.i2_bits = sum(b);
  b.total_bits = b.i2_bits;
  return b;
}

BitBudget total_bits(Release r, const OverheadConfig& c) {
  BitBudget i1 = bits_i1(r, c);
  BitBudget i2 = bits_i2(r, c);
  BitBudget out;
  out.fields = i1.fields;
  out.fields.insert(out.fields.end(), i2.fields.begin(), i2.fields.end());
  out.i1_bits = i1.i1_bits;
  out.i2_bits = i2.i2_bits * (is_r15(r) ? c.n3 : 1);
  const long long reports = r == Release::R18Regular ? 1 : c.n4;
  out.total_bits = (out.i1_bits + out.i2_bits) * reports;
  return out;
}

void write_overhead_csv(std::ostream& os, const std::vector<Release>& releases,
                        const OverheadConfig& base) {
  os << "release,L,field,bits,total\n";
  for (Release r : releases) {
    for (int L = 1; L <= 4; ++L) {
      OverheadConfig c = base;
      c.L = L;
      const BitBudget b = total_bits(r, c);
      std::vector<std::string> order;
      std::map<std::string, long long> per_field;
      for (const auto& f : b.fields) {
        if (!per_field.count(f.field)) order.push_back(f.field);
        per_field[f.field] += f.bits;
      }
      for (const auto& name : order)
        os << to_string(r) << ',' << L << ',' << name << ',' << per_field[name] << ',' << b.total_bits
           << '\n';
    }
  }
}

}  // namespace nrcb

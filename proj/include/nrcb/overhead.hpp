#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nrcb {

enum class Release { R15Regular, R15PortSelection, R16Regular, R16PortSelection, R17PortSelection, R18Regular };

std::string to_string(Release r);
Release parse_release(const std::string& s);
const std::vector<Release>& all_releases();

struct OverheadConfig {
  int n1n2 = 16;
  int o1o2 = 4;
  int n3 = 18;
  int n4 = 4;
  int q = 2;
  int rank = 2;
  int mv = 5;
  int n_psk = 4;
  int k2 = 6;       // maximum reported subband amplitudes per layer (R15)
  int knz = 20;
  int L = 4;
  int p_csirs = 32; // port-selection variants
  int d = 1;
  int k1 = 16;      // R17 selected ports
  int m = 2;        // R17 taps
  int n_threshold = 4;
};

// Fixed parameter set of the release comparison.
OverheadConfig figure_config(int L);

struct FieldBits {
  std::string field;
  int layer = -1;  // -1 for fields shared by all layers
  long long bits = 0;
};

struct BitBudget {
  std::vector<FieldBits> fields;
  long long i1_bits = 0;
  long long i2_bits = 0;
  long long total_bits = 0;
};

long long ceil_log2(unsigned long long x);

BitBudget bits_i1(Release r, const OverheadConfig& cfg);
BitBudget bits_i2(Release r, const OverheadConfig& cfg);
// Whole-report accounting: R15 repeats i2 per subband, R15-R17 repeat the
// report for each of the n4 intervals and R18 sends one predictive report.
BitBudget total_bits(Release r, const OverheadConfig& cfg);

// Rows release,L,field,bits,total for the regular releases over L = 1..4.
void write_overhead_csv(std::ostream& os, const std::vector<Release>& releases,
                        const OverheadConfig& base);

}  // namespace nrcb

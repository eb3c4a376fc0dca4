#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace nrcb {

using Json = nlohmann::ordered_json;

// r15-type1, r15-type2, r15-ps, r16, r16-ps, r17-ps, r18.
const std::vector<std::string>& vector_releases();
bool is_vector_release(const std::string& release);

// Default configuration object for a release, overridden key by key by user.
Json default_vector_config(const std::string& release);
Json merge_config(const std::string& release, const Json& user);

// One record per sampled valid report: release, config, pmi, expected
// precoder as [t][iota][port][layer] = [re, im], tolerance. Each line is a
// standalone object with numbers printed to 17 significant digits.
std::string make_record(const std::string& release, const Json& config, std::mt19937_64& rng,
                        double tolerance = 1e-9);
void generate_vectors(std::ostream& os, const std::string& release, const Json& config,
                      std::uint64_t seed, int samples);

// Reconstructs the record's report and compares it with its expected
// precoder. Throws FormatError on malformed records.
struct RecordCheck {
  bool ok = false;
  double max_error = 0;
  std::string message;
};
RecordCheck check_record(const Json& record);

struct ValidationReport {
  int records = 0;
  int passed = 0;
  std::vector<std::string> failures;  // one line per failing record
  bool ok() const { return records > 0 && passed == records; }
};
ValidationReport validate_stream(std::istream& is);

// Expected precoder of a record's config and report, same layout as above.
Json reconstruct_json(const std::string& release, const Json& config, const Json& pmi);

}  // namespace nrcb

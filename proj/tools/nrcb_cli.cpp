#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrcb/conformance.hpp"
#include "nrcb/experiment.hpp"
#include "nrcb/overhead.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string release;
  std::string config_path;
  std::uint64_t seed = 1;
  int trials = 0;
  std::vector<double> snr;
  std::string out;
  int samples = 10;
  std::string input;
};

nrcb::Json load_config(const std::string& path) {
  if (path.empty()) return nrcb::Json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  try {
    nrcb::Json j = nrcb::Json::parse(in);
    if (!j.is_object()) throw UsageError("config file must hold an object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
}

template <class T>
void take(const nrcb::Json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const nrcb::Json& j, const std::vector<std::string>& keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const auto& k : keys) known = known || k == it.key();
    if (!known) throw UsageError("unknown config key '" + it.key() + "'");
  }
}

// Writes to --out when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int cmd_gen_vectors(const Run& run) {
  if (!nrcb::is_vector_release(run.release))
    throw UsageError("--release must be one of r15-type1, r15-type2, r15-ps, r16, r16-ps, r17-ps, r18");
  if (run.samples < 0) throw UsageError("--samples must be nonnegative");
  nrcb::Json cfg;
  try {
    cfg = nrcb::merge_config(run.release, load_config(run.config_path));
  } catch (const nrcb::DomainError& e) {
    throw UsageError(e.what());
  }
  // Build everything first so that a bad config leaves no partial file.
  std::ostringstream buf;
  try {
    nrcb::generate_vectors(buf, run.release, cfg, run.seed, run.samples);
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  Sink sink(run.out);
  sink.os() << buf.str();
  return kOk;
}

int cmd_validate(const Run& run) {
  std::ifstream in(run.input);
  if (!in) throw UsageError("cannot open vector file '" + run.input + "'");
  const auto rep = nrcb::validate_stream(in);
  for (const auto& f : rep.failures) std::cerr << f << '\n';
  std::cout << rep.passed << "/" << rep.records << " records passed\n";
  return rep.ok() ? kOk : kValidationFailure;
}

int cmd_overhead(const Run& run) {
  std::vector<nrcb::Release> releases;
  if (run.release.empty() || run.release == "all") {
    releases = nrcb::all_releases();
  } else {
    try {
      releases.push_back(nrcb::parse_release(run.release));
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  nrcb::OverheadConfig base;
  const auto j = load_config(run.config_path);
  reject_unknown(j, {"n1n2", "o1o2", "n3", "n4", "q", "rank", "mv", "n_psk", "k2", "knz",
                     "p_csirs", "d", "k1", "m", "n_threshold"});
  take(j, "n1n2", base.n1n2);
  take(j, "o1o2", base.o1o2);
  take(j, "n3", base.n3);
  take(j, "n4", base.n4);
  take(j, "q", base.q);
  take(j, "rank", base.rank);
  take(j, "mv", base.mv);
  take(j, "n_psk", base.n_psk);
  take(j, "k2", base.k2);
  take(j, "knz", base.knz);
  take(j, "p_csirs", base.p_csirs);
  take(j, "d", base.d);
  take(j, "k1", base.k1);
  take(j, "m", base.m);
  take(j, "n_threshold", base.n_threshold);
  std::ostringstream buf;
  try {
    nrcb::write_overhead_csv(buf, releases, base);
  } catch (const std::exception& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  Sink sink(run.out);
  sink.os() << buf.str();
  return kOk;
}

void apply_channel(const nrcb::Json& j, nrcb::ChannelModel& ch) {
  take(j, "paths", ch.paths);
  take(j, "max_delay", ch.max_delay);
  take(j, "max_doppler", ch.max_doppler);
  take(j, "unit_spacing", ch.unit_spacing);
  take(j, "units", ch.units);
  take(j, "xpol", ch.xpol);
}

const std::vector<std::string> kChannelKeys{"paths", "max_delay", "max_doppler", "unit_spacing",
                                            "units", "xpol"};

std::vector<std::string> with_channel(std::vector<std::string> keys) {
  keys.insert(keys.end(), kChannelKeys.begin(), kChannelKeys.end());
  return keys;
}

int cmd_simulate(const Run& run) {
  nrcb::SeConfig c;
  const auto j = load_config(run.config_path);
  reject_unknown(j, with_channel({"arrays", "o1", "o2", "L", "n_psk", "nr"}));
  take(j, "arrays", c.arrays);
  take(j, "o1", c.o1);
  take(j, "o2", c.o2);
  take(j, "L", c.L);
  take(j, "n_psk", c.n_psk);
  take(j, "nr", c.nr);
  apply_channel(j, c.channel);
  c.seed = run.seed;
  if (run.trials > 0) c.trials = run.trials;
  if (!run.snr.empty()) c.snr_db = run.snr;
  nrcb::SeResult r;
  try {
    r = nrcb::spectral_efficiency_experiment(c);
  } catch (const nrcb::DomainError& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  Sink sink(run.out);
  nrcb::write_points_csv(sink.os(), r.points);
  return kOk;
}

int cmd_baselines(const Run& run) {
  nrcb::BaselineConfig c;
  const auto j = load_config(run.config_path);
  reject_unknown(j, with_channel({"users", "nr", "n1", "n2", "o1", "o2"}));
  take(j, "users", c.users);
  take(j, "nr", c.nr);
  take(j, "n1", c.geom.n1);
  take(j, "n2", c.geom.n2);
  take(j, "o1", c.geom.o1);
  take(j, "o2", c.geom.o2);
  apply_channel(j, c.channel);
  c.seed = run.seed;
  if (run.trials > 0) c.trials = run.trials;
  if (!run.snr.empty()) c.snr_db = run.snr;
  nrcb::BaselineResult r;
  try {
    r = nrcb::baselines_experiment(c);
  } catch (const nrcb::DomainError& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  Sink sink(run.out);
  nrcb::write_points_csv(sink.os(), r.points);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NR PMI codebook tools"};
  app.require_subcommand(1);
  Run run;

  auto add_common = [&](CLI::App* s) {
    s->add_option("--config", run.config_path, "JSON config file")->check(CLI::ExistingFile);
    s->add_option("--seed", run.seed, "random seed");
    s->add_option("--out", run.out, "output path (default stdout)");
  };

  auto* gen = app.add_subcommand("gen-vectors", "emit conformance vectors");
  gen->add_option("--release", run.release, "codebook release")->required();
  gen->add_option("--samples", run.samples, "number of records");
  add_common(gen);

  auto* val = app.add_subcommand("validate", "check a conformance vector file");
  val->add_option("file", run.input, "vector file")->required();

  auto* ovh = app.add_subcommand("overhead", "feedback-overhead table");
  ovh->add_option("--release", run.release, "release name or 'all'");
  add_common(ovh);

  auto* sim = app.add_subcommand("simulate", "spectral efficiency versus SNR");
  auto* base = app.add_subcommand("baselines", "multi-user full-CSI precoders");
  for (auto* s : {sim, base}) {
    s->add_option("--trials", run.trials, "Monte-Carlo trials");
    s->add_option("--snr", run.snr, "SNR grid in dB")->delimiter(',');
    add_common(s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*gen) return cmd_gen_vectors(run);
    if (*val) return cmd_validate(run);
    if (*ovh) return cmd_overhead(run);
    if (*sim) return cmd_simulate(run);
    if (*base) return cmd_baselines(run);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}

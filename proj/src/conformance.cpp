#include "nrcb/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nrcb/type1.hpp"
#include "nrcb/type2_r15.hpp"
#include "nrcb/type2_r16.hpp"
#include "nrcb/type2_r17.hpp"
#include "nrcb/type2_r18.hpp"

namespace nrcb {

const std::vector<std::string>& vector_releases() {
  static const std::vector<std::string> r{"r15-type1", "r15-type2", "r15-ps", "r16",
                                          "r16-ps",    "r17-ps",    "r18"};
  return r;
}

bool is_vector_release(const std::string& release) {
  for (const auto& r : vector_releases())
    if (r == release) return true;
  return false;
}

Json default_vector_config(const std::string& release) {
  if (release == "r15-type1")
    return {{"n1", 4}, {"n2", 1}, {"o1", 4}, {"o2", 1}, {"mode", 1}, {"rank", 1}, {"subband_count", 4}};
  if (release == "r15-type2")
    return {{"n1", 4}, {"n2", 1}, {"o1", 4}, {"o2", 1}, {"L", 4}, {"n_psk", 8},
            {"subband_amplitude", true}, {"rank", 2}, {"subband_count", 4}};
  if (release == "r15-ps")
    return {{"p_csirs", 16}, {"d", 2}, {"L", 4}, {"n_psk", 8}, {"subband_amplitude", true},
            {"rank", 2}, {"subband_count", 4}};
  if (release == "r16")
    return {{"n1", 4}, {"n2", 2}, {"o1", 4}, {"o2", 4}, {"param_combination", 5}, {"r", 1},
            {"n3", 18}, {"rank", 2}};
  if (release == "r16-ps")
    return {{"p_csirs", 32}, {"d", 2}, {"param_combination", 4}, {"r", 1}, {"n3", 24}, {"rank", 2}};
  if (release == "r17-ps")
    return {{"p_csirs", 32}, {"alpha_combo", 6}, {"n_threshold", 4}, {"n3", 18}, {"rank", 2}};
  if (release == "r18")
    return {{"n1", 4}, {"n2", 2}, {"o1", 4}, {"o2", 4}, {"param_combination", 5}, {"r", 1},
            {"n3", 18}, {"n4", 4}, {"rank", 2}};
  throw DomainError("unknown release '" + release + "'");
}

Json merge_config(const std::string& release, const Json& user) {
  Json c = default_vector_config(release);
  if (user.is_null()) return c;
  if (!user.is_object()) throw DomainError("config must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    if (!c.contains(it.key()))
      throw DomainError("config key '" + it.key() + "' does not apply to " + release);
    c[it.key()] = it.value();
  }
  return c;
}

namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

ArrayGeometry geom_of(const Json& c) {
  return {get<int>(c, "n1"), get<int>(c, "n2"), get<int>(c, "o1"), get<int>(c, "o2")};
}

Type1Config type1_cfg(const Json& c) {
  Type1Config t;
  t.geom = geom_of(c);
  t.mode = get<int>(c, "mode");
  t.rank = get<int>(c, "rank");
  t.subband_count = get<int>(c, "subband_count");
  return t;
}

T2R15Config r15_cfg(const Json& c, bool ps) {
  T2R15Config t;
  t.variant = ps ? CodebookVariant::PortSelection : CodebookVariant::Regular;
  if (ps) {
    t.p_csirs = get<int>(c, "p_csirs");
    t.d = get<int>(c, "d");
  } else {
    t.geom = geom_of(c);
  }
  t.L = get<int>(c, "L");
  t.n_psk = get<int>(c, "n_psk");
  t.subband_amplitude = get<bool>(c, "subband_amplitude");
  t.rank = get<int>(c, "rank");
  t.subband_count = get<int>(c, "subband_count");
  return t;
}

R16Config r16_cfg(const Json& c, bool ps) {
  R16Config t;
  t.variant = ps ? CodebookVariant::PortSelection : CodebookVariant::Regular;
  if (ps) {
    t.p_csirs = get<int>(c, "p_csirs");
    t.d = get<int>(c, "d");
  } else {
    t.geom = geom_of(c);
  }
  t.param_combination = get<int>(c, "param_combination");
  t.r = get<int>(c, "r");
  t.n3 = get<int>(c, "n3");
  t.rank = get<int>(c, "rank");
  return t;
}

R17Config r17_cfg(const Json& c) {
  R17Config t;
  t.p_csirs = get<int>(c, "p_csirs");
  t.param_combination = get<int>(c, "alpha_combo");
  t.n_threshold = get<int>(c, "n_threshold");
  t.n3 = get<int>(c, "n3");
  t.rank = get<int>(c, "rank");
  return t;
}

R18Config r18_cfg(const Json& c) {
  R18Config t;
  t.geom = geom_of(c);
  t.param_combination = get<int>(c, "param_combination");
  t.r = get<int>(c, "r");
  t.n3 = get<int>(c, "n3");
  t.n4 = get<int>(c, "n4");
  t.rank = get<int>(c, "rank");
  return t;
}

Json matrix_json(const CMat& w) {
  Json ports = Json::array();
  for (int p = 0; p < w.rows(); ++p) {
    Json layers = Json::array();
    for (int l = 0; l < w.cols(); ++l) layers.push_back(Json::array({w(p, l).real(), w(p, l).imag()}));
    ports.push_back(layers);
  }
  return ports;
}

// Coefficient layer fields shared by the frequency-compressed releases.
void put_coefficients(Json& j, const std::vector<std::vector<int>>& bitmap,
                      const std::vector<std::vector<int>>& k2, const std::vector<std::vector<int>>& c,
                      const int* k1, int i18) {
  j["i17"] = bitmap;
  j["i18"] = i18;
  j["i23"] = {k1[0], k1[1]};
  j["i24"] = k2;
  j["i25"] = c;
}

Json pmi_json(const Type1Pmi& p) { return {{"i11", p.i11}, {"i12", p.i12}, {"i13", p.i13}, {"i2", p.i2}}; }

Json pmi_json(const T2R15Pmi& p) {
  Json layers = Json::array();
  for (const auto& l : p.layers) layers.push_back({{"i13", l.i13}, {"i14", l.k1}, {"i21", l.c}, {"i22", l.k2}});
  return {{"q1", p.q1}, {"q2", p.q2}, {"i12", p.i12}, {"i11", p.i11}, {"layers", layers}};
}

Json pmi_json(const R16Pmi& p) {
  Json j = {{"q1", p.q1}, {"q2", p.q2}, {"i12", p.i12}, {"i11", p.i11}};
  if (p.i15) j["i15"] = *p.i15;
  Json layers = Json::array();
  for (const auto& l : p.layers) {
    Json o = {{"i16", l.i16}};
    put_coefficients(o, l.bitmap, l.k2, l.c, l.k1, l.i18);
    layers.push_back(o);
  }
  j["layers"] = layers;
  return j;
}

Json pmi_json(const R17Pmi& p) {
  Json j = Json::object();
  if (p.i12) j["i12"] = *p.i12;
  if (p.i16) j["i16"] = *p.i16;
  Json layers = Json::array();
  for (const auto& l : p.layers) {
    Json o = Json::object();
    put_coefficients(o, l.bitmap, l.k2, l.c, l.k1, l.i18);
    layers.push_back(o);
  }
  j["layers"] = layers;
  return j;
}

Json pmi_json(const R18Pmi& p) {
  Json j = {{"q1", p.q1}, {"q2", p.q2}, {"i12", p.i12}};
  if (p.i15) j["i15"] = *p.i15;
  Json layers = Json::array();
  for (const auto& l : p.layers) {
    Json o = {{"i16", l.i16}};
    if (l.i110) o["i110"] = *l.i110;
    o["i17"] = l.bitmap;
    o["i18"] = l.i18;
    o["i23"] = {l.k1[0], l.k1[1]};
    o["i24"] = l.k2;
    o["i25"] = l.c;
    layers.push_back(o);
  }
  j["layers"] = layers;
  return j;
}

const Json& layers_of(const Json& p) {
  if (!p.contains("layers") || !p.at("layers").is_array()) throw FormatError("missing 'layers' array");
  return p.at("layers");
}

void read_k1(const Json& l, int* k1) {
  const auto v = get<std::vector<int>>(l, "i23");
  if (v.size() != 2) throw FormatError("'i23' must hold two values");
  k1[0] = v[0];
  k1[1] = v[1];
}

Type1Pmi type1_pmi(const Json& j) {
  Type1Pmi p;
  p.i11 = get<int>(j, "i11");
  p.i12 = get<int>(j, "i12");
  p.i13 = get<int>(j, "i13");
  p.i2 = get<std::vector<int>>(j, "i2");
  return p;
}

T2R15Pmi r15_pmi(const Json& j) {
  T2R15Pmi p;
  p.q1 = get<int>(j, "q1");
  p.q2 = get<int>(j, "q2");
  p.i12 = get<u64>(j, "i12");
  p.i11 = get<int>(j, "i11");
  for (const auto& l : layers_of(j)) {
    T2R15Layer o;
    o.i13 = get<int>(l, "i13");
    o.k1 = get<std::vector<int>>(l, "i14");
    o.c = get<std::vector<std::vector<int>>>(l, "i21");
    o.k2 = get<std::vector<std::vector<int>>>(l, "i22");
    p.layers.push_back(o);
  }
  return p;
}

R16Pmi r16_pmi(const Json& j) {
  R16Pmi p;
  p.q1 = get<int>(j, "q1");
  p.q2 = get<int>(j, "q2");
  p.i12 = get<u64>(j, "i12");
  p.i11 = get<int>(j, "i11");
  if (j.contains("i15")) p.i15 = get<int>(j, "i15");
  for (const auto& l : layers_of(j)) {
    R16Layer o;
    o.i16 = get<u64>(l, "i16");
    o.bitmap = get<std::vector<std::vector<int>>>(l, "i17");
    o.i18 = get<int>(l, "i18");
    read_k1(l, o.k1);
    o.k2 = get<std::vector<std::vector<int>>>(l, "i24");
    o.c = get<std::vector<std::vector<int>>>(l, "i25");
    p.layers.push_back(o);
  }
  return p;
}

R17Pmi r17_pmi(const Json& j) {
  R17Pmi p;
  if (j.contains("i12")) p.i12 = get<u64>(j, "i12");
  if (j.contains("i16")) p.i16 = get<int>(j, "i16");
  for (const auto& l : layers_of(j)) {
    R17Layer o;
    o.bitmap = get<std::vector<std::vector<int>>>(l, "i17");
    o.i18 = get<int>(l, "i18");
    read_k1(l, o.k1);
    o.k2 = get<std::vector<std::vector<int>>>(l, "i24");
    o.c = get<std::vector<std::vector<int>>>(l, "i25");
    p.layers.push_back(o);
  }
  return p;
}

R18Pmi r18_pmi(const Json& j) {
  using Cube = std::vector<std::vector<std::vector<int>>>;
  R18Pmi p;
  p.q1 = get<int>(j, "q1");
  p.q2 = get<int>(j, "q2");
  p.i12 = get<u64>(j, "i12");
  if (j.contains("i15")) p.i15 = get<int>(j, "i15");
  for (const auto& l : layers_of(j)) {
    R18Layer o;
    o.i16 = get<u64>(l, "i16");
    if (l.contains("i110")) o.i110 = get<int>(l, "i110");
    o.bitmap = get<Cube>(l, "i17");
    o.i18 = get<int>(l, "i18");
    read_k1(l, o.k1);
    o.k2 = get<Cube>(l, "i24");
    o.c = get<Cube>(l, "i25");
    p.layers.push_back(o);
  }
  return p;
}

// [t][iota] -> P x rank matrix, flattened into the record layout.
template <class F>
Json sweep(int n_t, int n_iota, F&& build) {
  Json out = Json::array();
  for (int t = 0; t < n_t; ++t) {
    Json row = Json::array();
    for (int it = 0; it < n_iota; ++it) row.push_back(matrix_json(build(t, it)));
    out.push_back(row);
  }
  return out;
}

void dump17(std::ostream& os, const Json& j) {
  if (j.is_object()) {
    os << '{';
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ',';
      first = false;
      os << Json(it.key()).dump() << ':';
      dump17(os, it.value());
    }
    os << '}';
  } else if (j.is_array()) {
    os << '[';
    for (size_t i = 0; i < j.size(); ++i) {
      if (i) os << ',';
      dump17(os, j[i]);
    }
    os << ']';
  } else if (j.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    os << s;
  } else {
    os << j.dump();
  }
}

// Vectors only carry reports in which every selected beam, port, tap and
// shift has a nonzero coefficient, so that changing any selection changes
// the expected precoder.
bool load_bearing(const Type1Config&, const Type1Pmi&) { return true; }

bool load_bearing(const T2R15Config& c, const T2R15Pmi& p) {
  for (int i = 0; i < c.L; ++i) {
    bool used = false;
    for (const auto& l : p.layers) used = used || l.k1[i] > 0 || l.k1[i + c.L] > 0;
    if (!used) return false;
  }
  return true;
}

// coef(layer, tau, i, f) over a [layers][taus][2L][cols] block. Beams are
// shared by all layers; taps and shifts belong to one layer unless shared.
template <class Coef>
bool load_bearing_block(int layers, int taus, int L, int cols, bool shared_taps, Coef&& coef) {
  auto nz = [&](int l, int tau, int i, int f) { return std::abs(coef(l, tau, i, f)) > 0; };
  for (int i = 0; i < L; ++i) {
    bool used = false;
    for (int l = 0; l < layers; ++l)
      for (int tau = 0; tau < taus; ++tau)
        for (int f = 0; f < cols; ++f) used = used || nz(l, tau, i, f) || nz(l, tau, i + L, f);
    if (!used) return false;
  }
  for (int f = 0; f < cols; ++f) {
    bool any = false;
    for (int l = 0; l < layers; ++l) {
      bool used = false;
      for (int tau = 0; tau < taus; ++tau)
        for (int i = 0; i < 2 * L; ++i) used = used || nz(l, tau, i, f);
      if (!used && !shared_taps) return false;
      any = any || used;
    }
    if (!any) return false;
  }
  for (int l = 0; l < layers; ++l)
    for (int tau = 1; tau < taus; ++tau) {
      bool used = false;
      for (int i = 0; i < 2 * L; ++i)
        for (int f = 0; f < cols; ++f) used = used || nz(l, tau, i, f);
      if (!used) return false;
    }
  return true;
}

bool load_bearing(const R16Config& c, const R16Pmi& p) {
  const int L = c.L();
  return load_bearing_block(static_cast<int>(p.layers.size()), 1, L, compute_mv(c, c.rank), false,
                            [&](int l, int, int i, int f) { return r16_coefficient(p.layers[l], L, i, f); });
}

bool load_bearing(const R17Config& c, const R17Pmi& p) {
  const int L = c.L();
  return load_bearing_block(static_cast<int>(p.layers.size()), 1, L, c.M(), true,
                            [&](int l, int, int i, int f) { return r17_coefficient(p.layers[l], L, i, f); });
}

bool load_bearing(const R18Config& c, const R18Pmi& p) {
  const int L = c.L();
  return load_bearing_block(static_cast<int>(p.layers.size()), c.q_eff(), L, compute_mv(c, c.rank), false,
                            [&](int l, int tau, int i, int f) {
                              return r18_coefficient(p.layers[l], L, tau, i, f);
                            });
}

template <class Cfg>
Json draw_loaded(const Cfg& cfg, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const auto p = random_pmi(cfg, rng);
    if (load_bearing(cfg, p)) return pmi_json(p);
  }
  throw DomainError("configuration admits no report with every selection in use");
}

}  // namespace

Json reconstruct_json(const std::string& release, const Json& c, const Json& pmi) {
  if (release == "r15-type1") {
    const auto cfg = type1_cfg(c);
    const auto p = type1_pmi(pmi);
    validate_pmi(cfg, p);
    return sweep(cfg.subband_count, 1, [&](int t, int) { return build_type1(cfg, p, t); });
  }
  if (release == "r15-type2" || release == "r15-ps") {
    const auto cfg = r15_cfg(c, release == "r15-ps");
    const auto p = r15_pmi(pmi);
    return sweep(cfg.subband_count, 1, [&](int t, int) { return reconstruct(cfg, p, t); });
  }
  if (release == "r16" || release == "r16-ps") {
    const auto cfg = r16_cfg(c, release == "r16-ps");
    const auto p = r16_pmi(pmi);
    return sweep(cfg.n3, 1, [&](int t, int) { return reconstruct(cfg, p, t); });
  }
  if (release == "r17-ps") {
    const auto cfg = r17_cfg(c);
    const auto p = r17_pmi(pmi);
    return sweep(cfg.n3, 1, [&](int t, int) { return reconstruct(cfg, p, t); });
  }
  if (release == "r18") {
    const auto cfg = r18_cfg(c);
    const auto p = r18_pmi(pmi);
    return sweep(cfg.n3, cfg.n4, [&](int t, int it) { return reconstruct(cfg, p, t, it); });
  }
  throw DomainError("unknown release '" + release + "'");
}

std::string make_record(const std::string& release, const Json& c, std::mt19937_64& rng,
                        double tolerance) {
  Json pmi;
  // Redraw the rare reports whose combination vanishes on some unit.
  for (int attempt = 0;; ++attempt) {
    if (release == "r15-type1") pmi = draw_loaded(type1_cfg(c), rng);
    else if (release == "r15-type2" || release == "r15-ps") pmi = draw_loaded(r15_cfg(c, release == "r15-ps"), rng);
    else if (release == "r16" || release == "r16-ps") pmi = draw_loaded(r16_cfg(c, release == "r16-ps"), rng);
    else if (release == "r17-ps") pmi = draw_loaded(r17_cfg(c), rng);
    else if (release == "r18") pmi = draw_loaded(r18_cfg(c), rng);
    else throw DomainError("unknown release '" + release + "'");
    try {
      Json rec = Json::object();
      rec["release"] = release;
      rec["config"] = c;
      rec["pmi"] = pmi;
      rec["expected"] = reconstruct_json(release, c, pmi);
      rec["tolerance"] = tolerance;
      std::ostringstream os;
      dump17(os, rec);
      return os.str();
    } catch (const DegenerateError&) {
      if (attempt > 100) throw;
    }
  }
}

void generate_vectors(std::ostream& os, const std::string& release, const Json& config,
                      std::uint64_t seed, int samples) {
  require(samples >= 0, "sample count must be nonnegative");
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) os << make_record(release, config, rng) << '\n';
}

RecordCheck check_record(const Json& rec) {
  if (!rec.is_object()) throw FormatError("record is not an object");
  const auto release = get<std::string>(rec, "release");
  if (!is_vector_release(release)) throw FormatError("unknown release '" + release + "'");
  if (!rec.contains("config") || !rec.contains("pmi") || !rec.contains("expected"))
    throw FormatError("record lacks config, pmi or expected");
  const double tol = get<double>(rec, "tolerance");
  RecordCheck out;
  Json got;
  try {
    got = reconstruct_json(release, rec.at("config"), rec.at("pmi"));
  } catch (const FormatError& e) {
    out.message = std::string("report rejected: ") + e.what();
    return out;
  } catch (const std::exception& e) {
    out.message = std::string("report rejected: ") + e.what();
    return out;
  }
  const Json& exp = rec.at("expected");
  try {
    if (exp.size() != got.size()) throw FormatError("expected precoder has the wrong shape");
    for (size_t t = 0; t < got.size(); ++t) {
      if (exp[t].size() != got[t].size()) throw FormatError("expected precoder has the wrong shape");
      for (size_t it = 0; it < got[t].size(); ++it) {
        if (exp[t][it].size() != got[t][it].size()) throw FormatError("expected precoder has the wrong shape");
        for (size_t p = 0; p < got[t][it].size(); ++p) {
          if (exp[t][it][p].size() != got[t][it][p].size())
            throw FormatError("expected precoder has the wrong shape");
          for (size_t l = 0; l < got[t][it][p].size(); ++l) {
            const cd a(got[t][it][p][l][0].get<double>(), got[t][it][p][l][1].get<double>());
            const cd b(exp[t][it][p][l].at(0).get<double>(), exp[t][it][p][l].at(1).get<double>());
            out.max_error = std::max(out.max_error, std::abs(a - b));
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("expected precoder: ") + e.what());
  }
  out.ok = out.max_error <= tol;
  if (!out.ok) {
    std::ostringstream os;
    os << "max deviation " << out.max_error << " exceeds tolerance " << tol;
    out.message = os.str();
  }
  return out;
}

ValidationReport validate_stream(std::istream& is) {
  ValidationReport rep;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++rep.records;
    try {
      const Json rec = Json::parse(line);
      const RecordCheck c = check_record(rec);
      if (c.ok) ++rep.passed;
      else rep.failures.push_back("line " + std::to_string(lineno) + ": " + c.message);
    } catch (const nlohmann::json::exception& e) {
      rep.failures.push_back("line " + std::to_string(lineno) + ": format error: " + e.what());
    } catch (const FormatError& e) {
      rep.failures.push_back("line " + std::to_string(lineno) + ": format error: " + e.what());
    }
  }
  return rep;
}

}  // namespace nrcb

#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nrcb/combinadics.hpp"
#include "nrcb/conformance.hpp"
#include "nrcb/type2_r16.hpp"
#include "nrcb/type2_r17.hpp"
#include "nrcb/type2_r18.hpp"

namespace nrcb::testing {

// A report field that selects beams, ports, taps or shifts, with the number
// of values it can take.
struct SelectionField {
  int layer = -1;  // -1 for top-level fields
  std::string name;
  unsigned long long range = 0;
  int n3 = 0, mv = 0;  // i15 only: the window moves taps only above its start
};

inline int bit_width(unsigned long long range) {
  int b = 0;
  while (range > 1 && (1ULL << b) < range) ++b;
  return std::max(b, 1);
}

inline std::vector<SelectionField> selection_fields(const Json& rec) {
  const std::string rel = rec.at("release");
  const Json& c = rec.at("config");
  const Json& p = rec.at("pmi");
  const int rank = c.at("rank");
  std::vector<SelectionField> out;
  auto top = [&](const char* name, unsigned long long range) {
    if (p.contains(name)) out.push_back({-1, name, range});
  };
  auto per_layer = [&](const char* name, unsigned long long range) {
    for (int l = 0; l < static_cast<int>(p.at("layers").size()); ++l)
      if (p.at("layers")[l].contains(name)) out.push_back({l, name, range});
  };
  auto regular = [&](int L) {
    const int n1 = c.at("n1"), n2 = c.at("n2");
    top("q1", c.at("o1").get<int>());
    top("q2", c.at("o2").get<int>());
    top("i12", binomial(n1 * n2, L));
  };
  auto ports = [&](int L) {
    const int pc = c.at("p_csirs"), d = c.at("d");
    (void)L;
    top("i11", (pc + 2 * d - 1) / (2 * d));
  };
  if (rel == "r15-type1") {
    top("i11", c.at("n1").get<int>() * c.at("o1").get<int>());
    top("i12", c.at("n2").get<int>() * c.at("o2").get<int>());
    if (rank == 2) top("i13", 4);
  } else if (rel == "r15-type2") {
    regular(c.at("L"));
  } else if (rel == "r15-ps") {
    ports(c.at("L"));
  } else if (rel == "r16" || rel == "r16-ps") {
    R16Config t;
    t.param_combination = c.at("param_combination");
    t.r = c.at("r");
    t.n3 = c.at("n3");
    t.rank = rank;
    if (rel == "r16") {
      t.geom = {c.at("n1"), c.at("n2"), c.at("o1"), c.at("o2")};
      regular(t.L());
    } else {
      t.variant = CodebookVariant::PortSelection;
      t.p_csirs = c.at("p_csirs");
      t.d = c.at("d");
      ports(t.L());
    }
    const int mv = compute_mv(t, rank);
    top("i15", 2 * mv);
    if (!out.empty() && out.back().name == "i15") out.back().n3 = t.n3, out.back().mv = mv;
    per_layer("i16", tap_combination_count(t.n3, mv));
  } else if (rel == "r17-ps") {
    R17Config t;
    t.p_csirs = c.at("p_csirs");
    t.param_combination = c.at("alpha_combo");
    t.n_threshold = c.at("n_threshold");
    top("i12", binomial(t.p_csirs / 2, t.L()));
    top("i16", t.n_threshold - 1);
  } else if (rel == "r18") {
    R18Config t;
    t.geom = {c.at("n1"), c.at("n2"), c.at("o1"), c.at("o2")};
    t.param_combination = c.at("param_combination");
    t.r = c.at("r");
    t.n3 = c.at("n3");
    t.n4 = c.at("n4");
    t.rank = rank;
    regular(t.L());
    const int mv = compute_mv(t, rank);
    top("i15", 2 * mv);
    if (!out.empty() && out.back().name == "i15") out.back().n3 = t.n3, out.back().mv = mv;
    per_layer("i16", tap_combination_count(t.n3, mv));
    per_layer("i110", t.n4 - 1);
  }
  return out;
}

struct Perturbed {
  std::string what;
  Json record;
};

// Tap sets of every layer under the report's i15, empty when undecodable.
inline std::vector<std::vector<int>> window_taps(const Json& pmi, const SelectionField& f) {
  std::vector<std::vector<int>> out;
  try {
    const int mi = m_initial_from_i15(pmi.at("i15").get<int>(), f.mv);
    for (const auto& l : pmi.at("layers")) out.push_back(decode_taps(l.at("i16").get<u64>(), f.n3, f.mv, mi));
  } catch (const std::exception&) {
    out.clear();
  }
  return out;
}

// Every record obtained by flipping one bit of one selection field, leaving
// out the i15 flips that keep every layer's tap set.
inline std::vector<Perturbed> selection_bit_flips(const Json& rec) {
  std::vector<Perturbed> out;
  for (const auto& f : selection_fields(rec)) {
    for (int b = 0; b < bit_width(f.range); ++b) {
      Json r = rec;
      Json& slot = f.layer < 0 ? r["pmi"][f.name] : r["pmi"]["layers"][f.layer][f.name];
      slot = slot.get<long long>() ^ (1LL << b);
      if (f.name == "i15") {
        const auto after = window_taps(r["pmi"], f);
        if (!after.empty() && after == window_taps(rec.at("pmi"), f)) continue;
      }
      out.push_back({f.name + (f.layer < 0 ? "" : "[" + std::to_string(f.layer) + "]") + " bit " +
                         std::to_string(b),
                     std::move(r)});
    }
  }
  return out;
}

}  // namespace nrcb::testing

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "limitlearn/bridge.hpp"
#include "limitlearn/learner.hpp"
#include "limitlearn/separability.hpp"

namespace limitlearn {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Counts and characters

inline json to_json(ExtNat n) { return n.is_omega() ? json("omega") : json(n.value()); }

inline ExtNat ext_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "omega" || s == "w") return kOmega;
    throw ParseError(where + ": expected a count or \"omega\", got \"" + s + "\"");
  }
  if (j.is_number_unsigned()) return ExtNat(j.get<std::uint64_t>());
  if (j.is_number_integer()) throw RepresentationError(where + ": negative count");
  throw ParseError(where + ": expected a count or \"omega\"");
}

inline std::uint64_t size_from_string(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  std::uint64_t k = 0;
  try {
    k = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || s[0] == '-') throw ParseError(where + ": bad class size \"" + s + "\"");
  return k;
}

inline json to_json(const Character& c) {
  json ex = json::object();
  for (const auto& [k, v] : c.exceptions()) ex[std::to_string(k)] = to_json(v);
  return {{"default", to_json(c.default_count())}, {"exceptions", ex}, {"omega_count", to_json(c.omega_count())}};
}

/// Object form {"default", "exceptions", "omega_count"} (all optional,
/// non-canonical exceptions rejected) or shorthand [[size, count], ...] with
/// default 0, where size may be "omega".
inline Character character_from_json(const json& j, const std::string& where = "character") {
  if (j.is_array()) {
    Character::Exceptions ex;
    ExtNat omega = 0;
    bool saw_omega = false;
    for (const auto& e : j) {
      if (!e.is_array() || e.size() != 2) throw ParseError(where + ": shorthand entries are [size, count] pairs");
      const ExtNat count = ext_from_json(e[1], where);
      const ExtNat size = ext_from_json(e[0], where);
      if (size.is_zero()) throw RepresentationError(where + ": class size 0 is not a valid size");
      if (size.is_omega()) {
        if (saw_omega) throw RepresentationError(where + ": size omega listed twice");
        saw_omega = true;
        omega = count;
      } else if (!ex.emplace(size.value(), count).second) {
        throw RepresentationError(where + ": size " + size.to_string() + " listed twice");
      }
    }
    return Character::strict(0, ex, omega);
  }
  if (!j.is_object()) throw ParseError(where + ": expected an object or a shorthand list");
  for (const auto& [key, _] : j.items())
    if (key != "default" && key != "exceptions" && key != "omega_count")
      throw ParseError(where + ": unknown key \"" + key + "\"");
  const ExtNat def = j.contains("default") ? ext_from_json(j["default"], where + ".default") : ExtNat(0);
  const ExtNat omega = j.contains("omega_count") ? ext_from_json(j["omega_count"], where + ".omega_count") : ExtNat(0);
  Character::Exceptions ex;
  if (j.contains("exceptions")) {
    if (!j["exceptions"].is_object()) throw ParseError(where + ".exceptions: expected an object");
    for (const auto& [key, v] : j["exceptions"].items()) {
      const auto k = size_from_string(key, where + ".exceptions");
      if (k == 0) throw RepresentationError(where + ": class size 0 is not a valid size");
      ex[k] = ext_from_json(v, where + ".exceptions." + key);
    }
  }
  return Character::strict(def, ex, omega);
}

inline json to_json(const Component& c) { return json::array({to_json(c.size), c.index}); }

inline json to_json(const Separator& s) {
  json comps = json::array();
  for (const auto& c : s.components) comps.push_back(to_json(c));
  return {{"owner", s.owner.to_string()}, {"components", comps}};
}

inline json to_json(const BoundedVerdict& v) {
  json j = {{"verdict", v.to_string()}, {"bound", v.bound}, {"heuristic", v.heuristic}};
  if (v.refuting_member) j["refuting_member"] = *v.refuting_member;
  if (v.refuting_component) j["refuting_component"] = to_json(*v.refuting_component);
  return j;
}

// ---------------------------------------------------------------------------
// Families

inline json to_json(const Family& f) {
  json members = json::array();
  for (const auto& m : f.members) members.push_back(to_json(m));
  json j = {{"members", members}};
  if (f.generator) {
    json params = json::object();
    for (const auto& [k, v] : f.generator->params) params[k] = v;
    j["generator"] = {{"name", f.generator->name}, {"params", params}};
  }
  return j;
}

/// {"members": [...], "generator": {"name", "params"}?}. Unknown generator
/// names and parameters are parse errors; isomorphic duplicates are
/// representation errors.
inline Family family_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("family: expected an object");
  for (const auto& [key, _] : j.items())
    if (key != "members" && key != "generator" && key != "name" && key != "comment")
      throw ParseError("family: unknown key \"" + key + "\"");
  Family f;
  if (j.contains("members")) {
    if (!j["members"].is_array()) throw ParseError("family.members: expected a list");
    for (std::size_t i = 0; i < j["members"].size(); ++i)
      f.members.push_back(character_from_json(j["members"][i], "members[" + std::to_string(i) + "]"));
  }
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    if (!g.is_object() || !g.contains("name") || !g["name"].is_string())
      throw ParseError("family.generator: expected {\"name\": ..., \"params\": {...}}");
    std::map<std::string, std::int64_t> params;
    if (g.contains("params")) {
      if (!g["params"].is_object()) throw ParseError("family.generator.params: expected an object");
      for (const auto& [k, v] : g["params"].items()) {
        if (!v.is_number_integer()) throw ParseError("family.generator.params." + k + ": expected an integer");
        params[k] = v.get<std::int64_t>();
      }
    }
    try {
      f.generator = make_generator(g["name"].get<std::string>(), params);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string("family.generator: ") + e.what());
    }
  }
  if (f.members.empty() && !f.generator) throw ParseError("family: no members and no generator");
  f.validate();
  return f;
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Family load_family(const std::string& path) { return family_from_json(parse_json_text(read_file(path), path)); }

/// A character given inline: JSON text or the compact "[5:w,2:1]" form.
inline Character parse_character_arg(const std::string& s) {
  const auto t = s.find_first_not_of(" \t");
  if (t != std::string::npos && s[t] == '{') return character_from_json(parse_json_text(s, "character"));
  if (t != std::string::npos && s[t] == '[' && s.find(':') == std::string::npos)
    return character_from_json(parse_json_text(s, "character"));
  // Compact form: [k:n, ..., *:d, w:m]
  std::string body = s;
  body.erase(std::remove_if(body.begin(), body.end(), [](char ch) { return ch == ' ' || ch == '\t'; }), body.end());
  if (body.size() < 2 || body.front() != '[' || body.back() != ']') throw ParseError("character: bad form \"" + s + "\"");
  body = body.substr(1, body.size() - 2);
  ExtNat def = 0, omega = 0;
  Character::Exceptions ex;
  std::stringstream ss(body);
  std::string entry;
  auto count_of = [&](const std::string& v) -> ExtNat {
    if (v == "w" || v == "omega") return kOmega;
    return ExtNat(size_from_string(v, "character"));
  };
  while (std::getline(ss, entry, ',')) {
    if (entry.empty()) continue;
    const auto colon = entry.find(':');
    if (colon == std::string::npos) throw ParseError("character: entry \"" + entry + "\" lacks ':'");
    const std::string k = entry.substr(0, colon), v = entry.substr(colon + 1);
    if (k == "*") {
      def = count_of(v);
    } else if (k == "w" || k == "omega") {
      omega = count_of(v);
    } else {
      const auto size = size_from_string(k, "character");
      if (size == 0) throw RepresentationError("character: class size 0 is not a valid size");
      ex[size] = count_of(v);
    }
  }
  return Character::strict(def, ex, omega);
}

// ---------------------------------------------------------------------------
// Languages

inline json to_json(const SizeSequence& g) {
  json prefix = json::array();
  for (const auto& v : g.prefix()) prefix.push_back(to_json(v));
  json streams = json::array();
  for (const auto& s : g.streams()) {
    if (s.ascending)
      streams.push_back({{"ascending_from", s.start}, {"repeat", s.reps}});
    else
      streams.push_back({{"constant", to_json(s.value)}});
  }
  return {{"prefix", prefix}, {"streams", streams}};
}

inline json to_json(const FinitePermutation& p) {
  json out = json::array();
  for (const auto& [a, b] : p.moved()) out.push_back(json::array({a, b}));
  return out;
}

inline json to_json(const Language& l) {
  return {{"source", to_json(l.source)}, {"permutation", to_json(l.pi)}, {"g", to_json(l.g)}};
}

inline json codes_to_json(const std::vector<std::uint64_t>& codes) {
  json out = json::array();
  for (auto c : codes) {
    const auto [i, j] = cantor_unpair(c);
    out.push_back({{"code", c}, {"pair", json::array({i, j})}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Learner traces: one line per stage, "stage <n>: <character|?>", with " MC"
// marking a mind change.

inline void write_trace(std::ostream& os, const Trace& t) {
  std::size_t next_mc = 0;
  for (std::size_t n = 0; n < t.conjectures.size(); ++n) {
    os << "stage " << n << ": " << conjecture_to_string(t.conjectures[n]);
    if (next_mc < t.ex_mind_changes.size() && t.ex_mind_changes[next_mc] == n) {
      os << " MC";
      ++next_mc;
    }
    os << '\n';
  }
}

inline json summary_to_json(const SimulationResult& r) {
  return {{"converged", r.converged},
          {"stage", r.converged ? json(r.stage) : json(nullptr)},
          {"mind_changes", r.mind_changes},
          {"final", conjecture_to_string(r.trace.conjectures.empty() ? Conjecture() : r.trace.conjectures.back())}};
}

}  // namespace limitlearn

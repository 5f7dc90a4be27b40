#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "limitlearn/character.hpp"
#include "limitlearn/structure.hpp"

namespace limitlearn {

// ---------------------------------------------------------------------------
// Generators

/// A total enumeration index ↦ Character from the built-in registry, plus an
/// optional closed-form test for "component occurs in infinitely many members".
struct Generator {
  std::string name;
  std::map<std::string, std::int64_t> params;
  std::function<Character(std::uint64_t)> member;
  std::function<bool(const Component&)> recurs;  // may be empty
};

namespace generators {

/// n ↦ [5:n, 1:ω], n = 0,1,2,...
inline Generator five_n_tail() {
  Generator g{"five_n_tail", {}, nullptr, nullptr};
  g.member = [](std::uint64_t n) { return Character::of({{5, n}, {1, kOmega}}); };
  // ⟨5,i⟩ is in every member with n >= i; ⟨1,i⟩ is in all of them.
  g.recurs = [](const Component& c) { return c.size == ExtNat(5) || c.size == ExtNat(1); };
  return g;
}

/// A_j = [k : 1 - δ_jk] for j = 1,2,..., skipping A_exclude when exclude > 0.
inline Generator kronecker(std::int64_t exclude = 0) {
  Generator g{"kronecker", {}, nullptr, nullptr};
  if (exclude > 0) g.params["exclude"] = exclude;
  const auto skip = static_cast<std::uint64_t>(exclude > 0 ? exclude : 0);
  g.member = [skip](std::uint64_t i) {
    std::uint64_t j = i + 1;
    if (skip != 0 && j >= skip) ++j;
    return Character(1, {{j, 0}}, 0);
  };
  // Each member has exactly one class of every size but one.
  g.recurs = [](const Component& c) { return c.size.is_finite() && c.index == 1; };
  return g;
}

/// n ↦ [6:n+1].
inline Generator six_n() {
  Generator g{"six_n", {}, nullptr, nullptr};
  g.member = [](std::uint64_t n) { return Character::of({{6, n + 1}}); };
  g.recurs = [](const Component& c) { return c.size == ExtNat(6); };
  return g;
}

}  // namespace generators

inline std::vector<std::string> generator_names() { return {"five_n_tail", "kronecker", "six_n"}; }

inline Generator make_generator(const std::string& name, const std::map<std::string, std::int64_t>& params = {}) {
  for (const auto& [k, v] : params)
    if (!(name == "kronecker" && k == "exclude")) throw std::invalid_argument("unknown generator parameter: " + k);
  if (name == "five_n_tail") return generators::five_n_tail();
  if (name == "six_n") return generators::six_n();
  if (name == "kronecker") {
    auto it = params.find("exclude");
    return generators::kronecker(it == params.end() ? 0 : it->second);
  }
  throw std::invalid_argument("unknown generator: " + name);
}

// ---------------------------------------------------------------------------
// Families

struct Family {
  std::vector<Character> members;
  std::optional<Generator> generator;

  /// Throws RepresentationError on isomorphic duplicates.
  void validate() const {
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j)
        if (iso_eq(members[i], members[j]))
          throw RepresentationError("family members " + std::to_string(i) + " and " + std::to_string(j) +
                                    " are isomorphic");
  }

  bool has_infinite_classes() const {
    for (const auto& m : members)
      if (m.has_infinite_classes()) return true;
    return false;
  }
};

namespace detail {

inline void require_no_infinite(const Character& c, const char* what) {
  if (c.has_infinite_classes())
    throw PreconditionError(std::string(what) + " is defined only for characters without infinite classes");
}

inline void require_no_infinite(const std::vector<Character>& fam, const char* what) {
  for (const auto& c : fam) require_no_infinite(c, what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Limits and separability

/// Some A in fam with A ≇ s, A ↪fin s and char(s) ⊆ char(A).
inline std::optional<Character> is_limit_finite(const Character& s, const std::vector<Character>& fam) {
  detail::require_no_infinite(s, "is_limit_finite");
  detail::require_no_infinite(fam, "is_limit_finite");
  for (const auto& a : fam)
    if (!iso_eq(a, s) && fin_embeds(a, s) && char_subset(s, a)) return a;
  return std::nullopt;
}

struct BoundedVerdict {
  enum class Kind { Limit, NotLimit, Unknown };
  Kind kind = Kind::Unknown;
  std::uint64_t bound = 0;
  /// True when "limit" rests on sampled frequencies rather than the registry predicate.
  bool heuristic = false;
  /// Member index refuting the first clause, or the component refuting the second.
  std::optional<std::uint64_t> refuting_member;
  std::optional<Component> refuting_component;

  std::string to_string() const {
    switch (kind) {
      case Kind::Limit: return "limit";
      case Kind::NotLimit: return "not-limit";
      default: return "unknown(" + std::to_string(bound) + ")";
    }
  }
};

namespace detail {

/// Components of char(s) with Cantor code <= bound.
inline std::vector<Component> components_upto(const Character& s, std::uint64_t bound) {
  std::vector<Component> out;
  for (std::uint64_t code = 0; code <= bound; ++code) {
    auto [k, i] = cantor_unpair(code);
    if (k == 0 || i == 0) continue;
    Component c{ExtNat(k), i};
    if (component_in(s, c)) out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Definition of a limit of an infinite family, checked on the first N
/// generated members. Members isomorphic to s are skipped (s is not required
/// to be outside the family). The second clause is decided by the generator's
/// predicate on all components of char(s) with code <= N when it has one.
inline BoundedVerdict is_limit_infinite_bounded(const Character& s, const Generator& gen, std::uint64_t n) {
  if (!gen.member) throw PreconditionError("family has no generator");
  detail::require_no_infinite(s, "is_limit_infinite_bounded");
  BoundedVerdict v;
  v.bound = n;
  std::vector<Character> sample;
  for (std::uint64_t i = 0; i < n; ++i) {
    const Character a = gen.member(i);
    detail::require_no_infinite(a, "is_limit_infinite_bounded");
    if (iso_eq(a, s)) continue;
    if (!fin_embeds(a, s)) {
      v.kind = BoundedVerdict::Kind::NotLimit;
      v.refuting_member = i;
      return v;
    }
    sample.push_back(a);
  }
  const auto comps = detail::components_upto(s, n);
  if (gen.recurs) {
    for (const auto& c : comps)
      if (!gen.recurs(c)) {
        v.kind = BoundedVerdict::Kind::NotLimit;
        v.refuting_component = c;
        return v;
      }
    v.kind = BoundedVerdict::Kind::Limit;
    return v;
  }
  // No predicate: frequent in the sample and still occurring in its second half.
  const std::size_t half = (sample.size() + 1) / 2;
  for (const auto& c : comps) {
    std::size_t hits = 0;
    bool late = false;
    for (std::size_t i = 0; i < sample.size(); ++i)
      if (component_in(sample[i], c)) {
        ++hits;
        late = late || i >= sample.size() / 2;
      }
    if (hits < half || !late) return v;
  }
  v.kind = BoundedVerdict::Kind::Limit;
  v.heuristic = true;
  return v;
}

struct SeparabilityReport {
  bool separable = true;
  /// (limit s, witness A) when not separable.
  std::optional<std::pair<Character, Character>> counterexample;
};

/// For a finite family it suffices to look for a member that is a limit of
/// the rest, witnessed by one member.
inline SeparabilityReport finitely_separable(const std::vector<Character>& fam) {
  detail::require_no_infinite(fam, "finitely_separable");
  SeparabilityReport r;
  for (std::size_t i = 0; i < fam.size(); ++i) {
    std::vector<Character> rest;
    for (std::size_t j = 0; j < fam.size(); ++j)
      if (j != i) rest.push_back(fam[j]);
    if (auto w = is_limit_finite(fam[i], rest)) {
      r.separable = false;
      r.counterexample = std::make_pair(fam[i], *w);
      return r;
    }
  }
  return r;
}

inline bool fin_antichain(const std::vector<Character>& fam) {
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = 0; j < fam.size(); ++j)
      if (i != j && fin_embeds(fam[i], fam[j])) return false;
  return true;
}

/// Indices of members ≈fin to fam[idx], including idx.
inline std::vector<std::size_t> fin_class_of(const std::vector<Character>& fam, std::size_t idx) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < fam.size(); ++j)
    if (fin_biembeddable(fam[j], fam[idx])) out.push_back(j);
  return out;
}

// ---------------------------------------------------------------------------
// Separators

struct Separator {
  Character owner;
  std::set<Component> components;

  friend bool operator==(const Separator&, const Separator&) = default;
};

namespace detail {

/// Union of min(char(c) \ char(s)) over the non-isomorphic s ≈fin c; empty
/// differences are skipped.
inline Separator raw_separator(const Character& c, const std::vector<Character>& fam) {
  Separator sep{c, {}};
  for (const auto& s : fam) {
    if (iso_eq(s, c) || !fin_biembeddable(s, c)) continue;
    if (auto m = char_diff_min(c, s)) sep.components.insert(*m);
  }
  return sep;
}

}  // namespace detail

inline Separator separator_of(const Character& c, const std::vector<Character>& fam) {
  detail::require_no_infinite(fam, "separator_of");
  detail::require_no_infinite(c, "separator_of");
  bool member = false;
  for (const auto& s : fam) member = member || iso_eq(s, c);
  if (!member) throw PreconditionError("separator_of: character is not a family member");
  if (!finitely_separable(fam).separable) throw PreconditionError("separator_of: family is not finitely separable");
  return detail::raw_separator(c, fam);
}

inline bool separator_realized(const Separator& sep, const Character& finite_char) {
  for (const auto& comp : sep.components)
    if (!component_in(finite_char, comp)) return false;
  return true;
}

inline bool separator_realized(const Separator& sep, const FiniteStructure& f) {
  return separator_realized(sep, char_of_finite(f));
}

}  // namespace limitlearn

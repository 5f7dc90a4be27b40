#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "limitlearn/ext_nat.hpp"

namespace limitlearn {

/// A value violates the default-plus-exceptions representation (size 0,
/// non-canonical exception, duplicate family member, ...).
class RepresentationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its documented domain.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Cantor pairing

inline std::uint64_t cantor_pair(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t s = a + b;
  return s * (s + 1) / 2 + b;
}

inline std::pair<std::uint64_t, std::uint64_t> cantor_unpair(std::uint64_t code) {
  auto w = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(code) + 1.0) - 1.0) / 2.0);
  while (w * (w + 1) / 2 > code) --w;
  while ((w + 1) * (w + 2) / 2 <= code) ++w;
  const std::uint64_t b = code - w * (w + 1) / 2;
  return {w - b, b};
}

// ---------------------------------------------------------------------------
// Component

/// ⟨k,i⟩: "at least i classes of size k".
struct Component {
  ExtNat size;
  std::uint64_t index = 1;

  /// Cantor code of a finite-size component.
  std::uint64_t code() const { return cantor_pair(size.value(), index); }

  /// Finite sizes by Cantor code; OMEGA-size components after all of them, by index.
  friend bool operator<(const Component& a, const Component& b) {
    if (a.size.is_omega() != b.size.is_omega()) return b.size.is_omega();
    if (a.size.is_omega()) return a.index < b.index;
    return a.code() < b.code();
  }
  friend bool operator==(const Component&, const Component&) = default;

  std::string to_string() const {
    return "<" + size.to_string() + "," + std::to_string(index) + ">";
  }
};

// ---------------------------------------------------------------------------
// Character

/// Finite description of an isomorphism type of equivalence structure:
/// the count of classes of each finite size (a default plus finitely many
/// exceptions) and the count of infinite classes.
///
/// Always held in canonical form: no exception equals the default, so two
/// characters describe the same type iff they compare equal.
class Character {
 public:
  using Exceptions = std::map<std::uint64_t, ExtNat>;

  Character() = default;

  /// Canonicalizes (drops exceptions equal to the default). Rejects size 0.
  Character(ExtNat default_count, Exceptions exceptions, ExtNat omega_count)
      : default_(default_count), omega_(omega_count) {
    for (const auto& [k, v] : exceptions) {
      if (k == 0) throw RepresentationError("class size 0 is not a valid size");
      if (v != default_) exceptions_.emplace(k, v);
    }
  }

  /// Like the constructor but rejects non-canonical input instead of fixing it.
  static Character strict(ExtNat default_count, const Exceptions& exceptions, ExtNat omega_count) {
    for (const auto& [k, v] : exceptions)
      if (v == default_count)
        throw RepresentationError("exception for size " + std::to_string(k) +
                                  " equals the default count");
    return Character(default_count, exceptions, omega_count);
  }

  /// Shorthand [k1:n1, k2:n2, ...] with default 0.
  static Character of(std::initializer_list<std::pair<std::uint64_t, ExtNat>> sizes,
                      ExtNat omega_count = 0) {
    Exceptions ex;
    for (const auto& [k, v] : sizes) ex[k] = v;
    return Character(0, std::move(ex), omega_count);
  }

  /// [ω:n]: n infinite classes and nothing else.
  static Character infinite_classes(ExtNat n) { return Character(0, {}, n); }

  ExtNat default_count() const { return default_; }
  const Exceptions& exceptions() const { return exceptions_; }
  ExtNat omega_count() const { return omega_; }

  bool has_infinite_classes() const { return !omega_.is_zero(); }
  bool empty() const { return default_.is_zero() && exceptions_.empty() && omega_.is_zero(); }
  std::uint64_t max_key() const { return exceptions_.empty() ? 0 : exceptions_.rbegin()->first; }

  /// f(k) for k >= 1 or k = OMEGA.
  ExtNat count(ExtNat k) const {
    if (k.is_omega()) return omega_;
    if (k.is_zero()) throw PreconditionError("class size 0 is not a valid size");
    auto it = exceptions_.find(k.value());
    return it == exceptions_.end() ? default_ : it->second;
  }

  friend bool operator==(const Character&, const Character&) = default;
  friend auto operator<=>(const Character& a, const Character& b) {
    if (auto c = a.default_ <=> b.default_; c != 0) return c;
    if (auto c = a.omega_ <=> b.omega_; c != 0) return c;
    return a.exceptions_ <=> b.exceptions_;
  }

  /// Compact form: "[*:d,k:n,...,w:m]"; "*" is the default, "w" the infinite classes.
  std::string to_string() const {
    std::string s = "[";
    bool first = true;
    auto put = [&](const std::string& k, ExtNat v) {
      if (!first) s += ",";
      first = false;
      s += k + ":" + v.to_string();
    };
    if (!default_.is_zero()) put("*", default_);
    for (const auto& [k, v] : exceptions_) put(std::to_string(k), v);
    if (!omega_.is_zero()) put("w", omega_);
    return s + "]";
  }

 private:
  ExtNat default_ = 0;
  Exceptions exceptions_;
  ExtNat omega_ = 0;
};

inline ExtNat char_count(const Character& c, ExtNat k) { return c.count(k); }

/// Number of classes of size >= t (t finite >= 1, or OMEGA).
inline ExtNat cumulative_count(const Character& c, ExtNat t) {
  if (t.is_omega()) return c.omega_count();
  if (t.is_zero()) throw PreconditionError("threshold 0 is not a valid size");
  if (!c.default_count().is_zero()) return kOmega;
  ExtNat total = c.omega_count();
  for (auto it = c.exceptions().lower_bound(t.value()); it != c.exceptions().end(); ++it)
    total += it->second;
  return total;
}

inline bool component_in(const Character& c, const Component& comp) {
  return c.count(comp.size) >= ExtNat(comp.index);
}

/// char(a) ⊆ char(b), i.e. a(k) <= b(k) for every size k including OMEGA.
inline bool char_subset(const Character& a, const Character& b) {
  if (a.default_count() > b.default_count()) return false;
  if (a.omega_count() > b.omega_count()) return false;
  for (const auto& [k, v] : a.exceptions())
    if (v > b.count(k)) return false;
  for (const auto& [k, v] : b.exceptions())
    if (a.count(k) > v) return false;
  return true;
}

/// Least component (Cantor order) of char(c) \ char(s); both without infinite classes.
inline std::optional<Component> char_diff_min(const Character& c, const Character& s) {
  if (c.has_infinite_classes() || s.has_infinite_classes())
    throw PreconditionError("char_diff_min is defined only without infinite classes");
  // Past the largest exception both counts equal their defaults and the
  // candidate code grows with k, so k = max_key + 1 covers the whole tail.
  const std::uint64_t last = std::max(c.max_key(), s.max_key()) + 1;
  std::optional<Component> best;
  for (std::uint64_t k = 1; k <= last; ++k) {
    const ExtNat ck = c.count(k);
    const ExtNat sk = s.count(k);
    if (sk >= ck) continue;
    Component cand{ExtNat(k), sk.value() + 1};
    if (!best || cand < *best) best = cand;
  }
  return best;
}

namespace detail {

/// Thresholds at which the cumulative counts of a and b can change.
inline std::set<std::uint64_t> breakpoints(const Character& a, const Character& b) {
  std::set<std::uint64_t> t{1};
  for (const auto* c : {&a, &b})
    for (const auto& [k, v] : c->exceptions()) {
      t.insert(k);
      t.insert(k + 1);
    }
  return t;
}

}  // namespace detail

/// Every finite substructure of a embeds into b.
inline bool fin_embeds(const Character& a, const Character& b) {
  for (std::uint64_t t : detail::breakpoints(a, b))
    if (cumulative_count(a, t) > cumulative_count(b, t)) return false;
  return true;
}

/// The whole class multiset of a maps injectively and size-monotonically into b.
inline bool embeds(const Character& a, const Character& b) {
  return cumulative_count(a, kOmega) <= cumulative_count(b, kOmega) && fin_embeds(a, b);
}

inline bool iso_eq(const Character& a, const Character& b) { return a == b; }
inline bool biembeddable(const Character& a, const Character& b) {
  return embeds(a, b) && embeds(b, a);
}
inline bool fin_biembeddable(const Character& a, const Character& b) {
  return fin_embeds(a, b) && fin_embeds(b, a);
}

}  // namespace limitlearn

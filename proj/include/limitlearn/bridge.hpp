#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "limitlearn/character.hpp"
#include "limitlearn/learner.hpp"
#include "limitlearn/presentation.hpp"

namespace limitlearn {

// ---------------------------------------------------------------------------
// Size sequences

/// A map slot ↦ class size (0 = no class). A finite prefix followed by a tail
/// that deals slots round-robin to streams; a stream is either a constant or
/// the ascending sizes start, start+1, ... each repeated `reps` times. With no
/// streams the tail is 0.
class SizeSequence {
 public:
  struct Stream {
    bool ascending = false;
    ExtNat value;              // constant streams
    std::uint64_t start = 1;   // ascending streams
    std::uint64_t reps = 1;
    friend bool operator==(const Stream&, const Stream&) = default;
  };

  SizeSequence() = default;
  SizeSequence(std::vector<ExtNat> prefix, std::vector<Stream> streams)
      : prefix_(std::move(prefix)), streams_(std::move(streams)) {
    for (const auto& s : streams_)
      if (s.ascending && (s.reps == 0 || s.start == 0)) throw RepresentationError("bad ascending stream");
  }

  ExtNat operator()(std::uint64_t i) const {
    if (i < prefix_.size()) return prefix_[i];
    if (streams_.empty()) return 0;
    const std::uint64_t t = i - prefix_.size();
    const Stream& s = streams_[t % streams_.size()];
    if (!s.ascending) return s.value;
    return s.start + (t / streams_.size()) / s.reps;
  }

  const std::vector<ExtNat>& prefix() const { return prefix_; }
  const std::vector<Stream>& streams() const { return streams_; }

  friend bool operator==(const SizeSequence&, const SizeSequence&) = default;

 private:
  std::vector<ExtNat> prefix_;
  std::vector<Stream> streams_;
};

/// Canonical g for a character: finitely many classes of each size up to the
/// largest exception, ascending, then the finitely many infinite classes; the
/// tail interleaves one stream per size with infinitely many classes (OMEGA
/// last) and, for a nonzero default, the sizes above the largest exception.
/// A default of OMEGA has no such enumeration and is rejected.
inline SizeSequence g_of_char(const Character& c) {
  if (c.default_count().is_omega())
    throw RepresentationError("characters with default count w have no size sequence");
  std::vector<ExtNat> prefix;
  std::vector<SizeSequence::Stream> streams;
  for (std::uint64_t k = 1; k <= c.max_key(); ++k) {
    const ExtNat n = c.count(k);
    if (n.is_omega()) {
      streams.push_back({false, k, 1, 1});
      continue;
    }
    for (std::uint64_t j = 0; j < n.value(); ++j) prefix.push_back(k);
  }
  if (c.omega_count().is_omega())
    streams.push_back({false, kOmega, 1, 1});
  else
    for (std::uint64_t j = 0; j < c.omega_count().value(); ++j) prefix.push_back(kOmega);
  if (!c.default_count().is_zero()) streams.push_back({true, 0, c.max_key() + 1, c.default_count().value()});
  return SizeSequence(std::move(prefix), std::move(streams));
}

// ---------------------------------------------------------------------------
// Finite permutations

class FinitePermutation {
 public:
  FinitePermutation() = default;

  /// From the images of 0..m; must be a bijection of {0..m}.
  static FinitePermutation from_images(const std::vector<std::uint64_t>& img) {
    std::vector<bool> seen(img.size(), false);
    FinitePermutation p;
    for (std::uint64_t i = 0; i < img.size(); ++i) {
      if (img[i] >= img.size() || seen[img[i]]) throw RepresentationError("not a permutation of 0..m");
      seen[img[i]] = true;
      if (img[i] != i) p.map_[i] = img[i];
    }
    return p;
  }
  static FinitePermutation transposition(std::uint64_t a, std::uint64_t b) {
    FinitePermutation p;
    if (a != b) {
      p.map_[a] = b;
      p.map_[b] = a;
    }
    return p;
  }

  std::uint64_t operator()(std::uint64_t x) const {
    auto it = map_.find(x);
    return it == map_.end() ? x : it->second;
  }
  bool is_identity() const { return map_.empty(); }
  /// One past the largest moved point (0 for the identity).
  std::uint64_t extent() const { return map_.empty() ? 0 : map_.rbegin()->first + 1; }
  const std::map<std::uint64_t, std::uint64_t>& moved() const { return map_; }

  std::string to_string() const {
    std::string s = "{";
    for (const auto& [a, b] : map_) s += (s.size() > 1 ? "," : "") + std::to_string(a) + "->" + std::to_string(b);
    return s + "}";
  }

  friend bool operator==(const FinitePermutation&, const FinitePermutation&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> map_;
};

// ---------------------------------------------------------------------------
// Languages L(g_A ∘ π)

/// L(h) = {⟨i,j⟩ : j < h(i)} for h = g_of_char(source) ∘ pi.
struct Language {
  Character source;
  FinitePermutation pi;
  SizeSequence g;

  static Language of(const Character& c, FinitePermutation p = {}) { return {c, std::move(p), g_of_char(c)}; }

  ExtNat h(std::uint64_t i) const { return g(pi(i)); }
  /// First slot from which h agrees with the tail of g.
  std::uint64_t tail_start() const {
    return std::max<std::uint64_t>(g.prefix().size(), pi.extent());
  }
  std::string to_string() const {
    return "L(" + source.to_string() + (pi.is_identity() ? "" : " o " + pi.to_string()) + ")";
  }
};

inline bool lang_member(const Language& l, std::uint64_t code) {
  const auto [i, j] = cantor_unpair(code);
  return ExtNat(j) < l.h(i);
}

namespace detail {

/// h(N + r + qP) as b + a·q (a = 0 for constants), valid for N >= tail start
/// and P a multiple of every stream period.
struct Linear {
  ExtNat b;
  std::uint64_t a = 0;
};

inline std::uint64_t tail_period(const SizeSequence& g) {
  const auto r = static_cast<std::uint64_t>(std::max<std::size_t>(1, g.streams().size()));
  std::uint64_t p = r;
  for (const auto& s : g.streams())
    if (s.ascending) p = std::lcm(p, r * s.reps);
  return p;
}

inline Linear tail_linear(const SizeSequence& g, std::uint64_t at, std::uint64_t period) {
  if (g.streams().empty()) return {0, 0};
  const std::uint64_t r = g.streams().size();
  const std::uint64_t t = at - g.prefix().size();
  const auto& s = g.streams()[t % r];
  if (!s.ascending) return {s.value, 0};
  return {ExtNat(s.start + (t / r) / s.reps), (period / r) / s.reps};
}

}  // namespace detail

/// h1(i) <= h2(i) for every i >= from.
inline bool h_leq_from(const Language& l1, const Language& l2, std::uint64_t from = 0) {
  const std::uint64_t n = std::max({from, l1.tail_start(), l2.tail_start()});
  for (std::uint64_t i = from; i < n; ++i)
    if (l1.h(i) > l2.h(i)) return false;
  const std::uint64_t p = std::lcm(detail::tail_period(l1.g), detail::tail_period(l2.g));
  for (std::uint64_t r = 0; r < p; ++r) {
    const auto a = detail::tail_linear(l1.g, n + r, p), b = detail::tail_linear(l2.g, n + r, p);
    if (b.b.is_omega()) continue;
    if (a.b.is_omega() || a.b > b.b || a.a > b.a) return false;
  }
  return true;
}

inline bool lang_subset(const Language& a, const Language& b) { return h_leq_from(a, b); }
inline bool lang_equal(const Language& a, const Language& b) { return lang_subset(a, b) && lang_subset(b, a); }

namespace detail {

/// Kuhn's algorithm; true iff every left vertex can be matched.
template <class Edge>
bool perfect_left_matching(std::size_t left, std::size_t right, Edge edge) {
  if (left > right) return false;
  std::vector<char> adj(left * right);
  for (std::size_t u = 0; u < left; ++u)
    for (std::size_t v = 0; v < right; ++v) adj[u * right + v] = edge(u, v) ? 1 : 0;
  std::vector<std::ptrdiff_t> owner(right, -1);
  std::vector<char> seen;
  std::function<bool(std::size_t)> grow = [&](std::size_t u) {
    for (std::size_t v = 0; v < right; ++v) {
      if (seen[v] || !adj[u * right + v]) continue;
      seen[v] = 1;
      if (owner[v] < 0 || grow(static_cast<std::size_t>(owner[v]))) {
        owner[v] = static_cast<std::ptrdiff_t>(u);
        return true;
      }
    }
    return false;
  };
  for (std::size_t u = 0; u < left; ++u) {
    seen.assign(right, 0);
    if (!grow(u)) return false;
  }
  return true;
}

inline std::vector<ExtNat> h_values(const Language& l, std::uint64_t n) {
  std::vector<ExtNat> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = l.h(i);
  return out;
}

/// need[i] = 1 + largest j with ⟨i,j⟩ among the codes.
inline std::vector<std::uint64_t> needs_of(const std::vector<std::uint64_t>& codes) {
  std::vector<std::uint64_t> need;
  for (auto c : codes) {
    const auto [i, j] = cantor_unpair(c);
    if (need.size() <= i) need.resize(i + 1, 0);
    need[i] = std::max(need[i], j + 1);
  }
  return need;
}

}  // namespace detail

/// Least finite permutation π (ordered by extent, then lexicographically on
/// π(0), π(1), ...) with every code in `codes` in L(g_c ∘ π), trying extents
/// up to the largest data slot + `slack`.
inline std::optional<FinitePermutation> least_consistent_permutation(const Character& c,
                                                                     const std::vector<std::uint64_t>& codes,
                                                                     std::uint64_t slack = 64) {
  const SizeSequence g = g_of_char(c);
  const auto need = detail::needs_of(codes);
  std::uint64_t lo = 0;
  for (std::uint64_t i = 0; i < need.size(); ++i)
    if (g(i) < ExtNat(need[i])) lo = i + 1;
  if (lo == 0) return FinitePermutation();
  auto need_at = [&](std::uint64_t i) { return ExtNat(i < need.size() ? need[i] : 0); };
  std::vector<ExtNat> gv;
  for (std::uint64_t m = lo; m <= need.size() + slack; ++m) {
    while (gv.size() < m) gv.push_back(g(gv.size()));
    auto ok = [&](std::size_t i, std::size_t k) { return gv[k] >= need_at(i); };
    if (!detail::perfect_left_matching(m, m, ok)) continue;
    std::vector<std::uint64_t> img(m);
    std::vector<bool> used(m, false);
    for (std::uint64_t i = 0; i < m; ++i) {
      for (std::uint64_t k = 0; k < m; ++k) {
        if (used[k] || !ok(i, k)) continue;
        used[k] = true;
        // Remaining slots i+1.. against remaining values.
        std::vector<std::uint64_t> free_vals;
        for (std::uint64_t v = 0; v < m; ++v)
          if (!used[v]) free_vals.push_back(v);
        const bool completes = detail::perfect_left_matching(
            m - i - 1, free_vals.size(), [&](std::size_t a, std::size_t b) { return ok(i + 1 + a, free_vals[b]); });
        if (completes) {
          img[i] = k;
          break;
        }
        used[k] = false;
      }
    }
    return FinitePermutation::from_images(img);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tell-tales

/// Is there L' = L(g_b ∘ π') with π' moving only slots < window, such that
/// every slot i < window has need[i] <= h'(i) <= h(i), h' <= h beyond the
/// window, and L' ≠ L?
inline bool proper_sublanguage_exists(const Language& l, const Character& b, const std::vector<std::uint64_t>& need,
                                      std::uint64_t window) {
  const Language lb = Language::of(b);
  if (!h_leq_from(lb, l, window)) return false;
  for (std::uint64_t i = window; i < need.size(); ++i)
    if (lb.h(i) < ExtNat(need[i])) return false;
  auto need_at = [&](std::uint64_t i) { return ExtNat(i < need.size() ? need[i] : 0); };
  const auto hl = detail::h_values(l, window), hb = detail::h_values(lb, window);
  const bool matched = detail::perfect_left_matching(window, window, [&](std::size_t i, std::size_t k) {
    return hb[k] >= need_at(i) && hb[k] <= hl[i];
  });
  if (!matched) return false;
  std::multiset<ExtNat> mine(hl.begin(), hl.end()), theirs(hb.begin(), hb.end());
  // h' <= h pointwise with equal multisets on the window forces equality there.
  return mine != theirs || !h_leq_from(l, lb, window);
}

struct TelltaleResult {
  std::optional<std::vector<std::uint64_t>> d;  // codes, ascending
  std::uint64_t bound = 0;
  bool found() const { return d.has_value(); }
};

namespace detail {

inline std::vector<std::uint64_t> codes_below(const Language& l, std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t c = 0; c < bound; ++c)
    if (lang_member(l, c)) out.push_back(c);
  return out;
}

/// Largest candidate first; if it fails nothing within the bound works.
/// Otherwise drop codes from the top while the rest still works.
inline TelltaleResult telltale_minimize(const Language& l, std::uint64_t bound,
                                        const std::function<bool(const std::vector<std::uint64_t>&)>& works) {
  TelltaleResult r;
  r.bound = bound;
  auto d = codes_below(l, bound);
  if (!works(d)) return r;
  for (std::size_t k = d.size(); k-- > 0;) {
    auto without = d;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(k));
    if (works(without)) d = std::move(without);
  }
  r.d = std::move(d);
  return r;
}

}  // namespace detail

/// Tell-tale of `l` against an explicit list of languages: a set D of codes
/// below `bound` with no L' in the list, L' ≠ l, satisfying D ⊆ L' ⊆ l.
inline TelltaleResult telltale_search(const Language& l, const std::vector<Language>& fam, std::uint64_t bound) {
  return detail::telltale_minimize(l, bound, [&](const std::vector<std::uint64_t>& d) {
    for (const auto& other : fam) {
      if (!lang_subset(other, l) || lang_subset(l, other)) continue;
      bool covers = true;
      for (auto c : d) covers = covers && lang_member(other, c);
      if (covers) return false;
    }
    return true;
  });
}

/// The same against every L(g_B ∘ π') with B in `fam` and π' moving only slots
/// below `bound`.
inline TelltaleResult telltale_search_closure(const Language& l, const std::vector<Character>& fam,
                                              std::uint64_t bound) {
  return detail::telltale_minimize(l, bound, [&](const std::vector<std::uint64_t>& d) {
    const auto need = detail::needs_of(d);
    for (const auto& b : fam)
      if (proper_sublanguage_exists(l, b, need, bound)) return false;
    return true;
  });
}

/// Sample of the finite-permutation closure of L(g_c): the identity, some
/// transpositions and a few shuffles, all inside slots 0..5 so that
/// tell-tales of the variants still fit under code 64.
inline std::vector<Language> permutation_variants(const Character& c, std::uint64_t seed = 0) {
  std::vector<Language> out{Language::of(c)};
  for (auto [a, b] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{0, 1}, {0, 5}, {2, 4}, {1, 3}})
    out.push_back(Language::of(c, FinitePermutation::transposition(a, b)));
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 3; ++k) {
    std::vector<std::uint64_t> img(6);
    std::iota(img.begin(), img.end(), 0);
    std::shuffle(img.begin(), img.end(), rng);
    out.push_back(Language::of(c, FinitePermutation::from_images(img)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Language learners

/// A text item: a code or a pause.
using LangItem = std::optional<std::uint64_t>;
using LangConjecture = std::optional<Language>;

class LangLearner {
 public:
  virtual ~LangLearner() = default;
  virtual void reset() = 0;
  virtual const LangConjecture& feed(const LangItem& x) = 0;
  virtual const LangConjecture& current() const = 0;
  virtual std::unique_ptr<LangLearner> clone() const = 0;
  virtual std::string name() const = 0;
};

/// Reads a language text as the finite structure on the codes seen, where
/// ⟨i,j⟩ and ⟨i',j'⟩ are equivalent iff i = i'; runs a structure learner on
/// its informant and answers L(g_A ∘ π) for the conjectured A and the least
/// consistent π.
class StructToLangLearner : public LangLearner {
 public:
  explicit StructToLangLearner(std::unique_ptr<Learner> m, std::uint64_t slack = 64)
      : proto_(std::move(m)), slack_(slack) {
    reset();
  }
  StructToLangLearner(const StructToLangLearner& o)
      : proto_(o.proto_->clone()), m_(o.m_->clone()), slack_(o.slack_), codes_(o.codes_), seen_(o.seen_),
        c_(o.c_) {}

  void reset() override {
    m_ = proto_->clone();
    m_->reset();
    codes_.clear();
    seen_.clear();
    c_.reset();
    answer();
  }

  const LangConjecture& feed(const LangItem& x) override {
    if (!x || !seen_.insert(*x).second) return c_;
    const std::uint64_t slot = cantor_unpair(*x).first;
    // Introduce the new element: link to the first code of its slot, then
    // label against every earlier code.
    std::optional<std::uint64_t> first;
    for (auto y : codes_)
      if (cantor_unpair(y).first == slot) {
        first = y;
        break;
      }
    if (first) {
      m_->feed(Item::positive(*first, *x));
      m_->feed(Item::positive(*x, *first));
    }
    m_->feed(Item::positive(*x, *x));
    for (auto y : codes_) {
      if (first && y == *first) continue;
      const bool same = cantor_unpair(y).first == slot;
      m_->feed(same ? Item::positive(y, *x) : Item::negative(y, *x));
      m_->feed(same ? Item::positive(*x, y) : Item::negative(*x, y));
    }
    codes_.push_back(*x);
    answer();
    return c_;
  }

  const LangConjecture& current() const override { return c_; }
  std::unique_ptr<LangLearner> clone() const override { return std::make_unique<StructToLangLearner>(*this); }
  std::string name() const override { return "lang(" + proto_->name() + ")"; }

 private:
  void answer() {
    const Conjecture& a = m_->current();
    if (!a) {
      c_.reset();
      return;
    }
    // The current language stays if it still covers the data.
    if (c_ && c_->source == *a) {
      bool ok = true;
      for (auto x : codes_) ok = ok && lang_member(*c_, x);
      if (ok) return;
    }
    try {
      auto pi = least_consistent_permutation(*a, codes_, slack_);
      if (pi)
        c_ = Language::of(*a, std::move(*pi));
      else
        c_.reset();
    } catch (const RepresentationError&) {
      c_.reset();
    }
  }

  std::unique_ptr<Learner> proto_;
  std::unique_ptr<Learner> m_;
  std::uint64_t slack_;
  std::vector<std::uint64_t> codes_;
  std::set<std::uint64_t> seen_;
  LangConjecture c_;
};

/// From an informant: slots are the classes in order of first appearance and
/// g(i) the size of slot i. Conjectures the character behind the minimal
/// language over {⟨i,j⟩ : j < g(i)}: either by direct search in the family's
/// permutation closure (slots below `window`), or by feeding the codes as a
/// text to a language learner and reading off the source of its conjecture.
class LangToStructLearner : public ClonableLearner<LangToStructLearner> {
 public:
  LangToStructLearner(std::vector<Character> fam, std::uint64_t window = 64)
      : fam_(std::move(fam)), window_(window) {
    reset();
  }
  explicit LangToStructLearner(const LangLearner& via) : via_(via.clone()) { reset(); }
  LangToStructLearner(const LangToStructLearner& o)
      : fam_(o.fam_), window_(o.window_), via_(o.via_ ? o.via_->clone() : nullptr), st_(o.st_), fed_(o.fed_), c_(o.c_) {}

  void reset() override {
    st_ = PrefixState();
    fed_.clear();
    if (via_) via_->reset();
    c_.reset();
  }
  const Conjecture& feed(const Item& item) override {
    if (st_.push(item)) recompute();
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return via_ ? "struct(" + via_->name() + ")" : "struct(direct)"; }

  /// Class sizes by slot.
  std::vector<std::uint64_t> slot_sizes() const {
    std::map<std::uint32_t, std::uint64_t> slot_of_root;
    std::vector<std::uint64_t> g;
    for (std::uint32_t id = 0; id < st_.element_count(); ++id) {
      const auto r = st_.find(id);
      auto [it, fresh] = slot_of_root.try_emplace(r, g.size());
      if (fresh) g.push_back(st_.class_size(r));
    }
    return g;
  }

 private:
  void recompute() {
    const auto g = slot_sizes();
    std::vector<std::uint64_t> codes;
    for (std::uint64_t i = 0; i < g.size(); ++i)
      for (std::uint64_t j = 0; j < g[i]; ++j) codes.push_back(cantor_pair(i, j));
    std::sort(codes.begin(), codes.end());
    if (via_) {
      // One running text: new codes are appended; a merge shrinks the code
      // set and restarts the text.
      if (!std::includes(codes.begin(), codes.end(), fed_.begin(), fed_.end())) {
        via_->reset();
        fed_.clear();
      }
      for (auto c : codes)
        if (fed_.insert(c).second) via_->feed(c);
      c_ = via_->current() ? Conjecture(via_->current()->source) : std::nullopt;
      return;
    }
    const auto need = detail::needs_of(codes);
    const std::uint64_t window = std::max<std::uint64_t>(window_, need.size());
    c_.reset();
    for (const auto& a : fam_) {
      std::optional<FinitePermutation> pi;
      try {
        pi = least_consistent_permutation(a, codes, window);
      } catch (const RepresentationError&) {
        continue;
      }
      if (!pi) continue;
      const Language la = Language::of(a, *pi);
      bool minimal = true;
      for (const auto& b : fam_)
        if (proper_sublanguage_exists(la, b, need, std::max<std::uint64_t>(window, la.tail_start()))) {
          minimal = false;
          break;
        }
      if (minimal) {
        c_ = a;
        return;
      }
    }
  }

  std::vector<Character> fam_;
  std::uint64_t window_ = 64;
  std::unique_ptr<LangLearner> via_;
  PrefixState st_;
  std::set<std::uint64_t> fed_;
  Conjecture c_;
};

// ---------------------------------------------------------------------------
// Language texts and simulation

/// Item n is code n when it is in the language, a pause otherwise.
class LangText {
 public:
  explicit LangText(Language l) : l_(std::move(l)) {}
  LangItem next() {
    const std::uint64_t c = n_++;
    return lang_member(l_, c) ? LangItem(c) : std::nullopt;
  }

 private:
  Language l_;
  std::uint64_t n_ = 0;
};

struct LangSimulationResult {
  std::vector<LangConjecture> conjectures;
  bool converged = false;
  std::size_t stage = 0;
  std::size_t mind_changes = 0;
};

inline bool same_conjecture(const LangConjecture& a, const LangConjecture& b) {
  if (!a || !b) return !a && !b;
  return lang_equal(*a, *b);
}

inline LangSimulationResult run_lang_simulation(LangLearner& l, const Language& target, std::size_t stages,
                                                std::size_t window = 200) {
  l.reset();
  LangText text(target);
  LangSimulationResult r;
  for (std::size_t n = 0; n < stages; ++n) {
    const LangConjecture& c = l.feed(text.next());
    if (!r.conjectures.empty() && !same_conjecture(r.conjectures.back(), c)) {
      ++r.mind_changes;
      r.stage = n;
    }
    r.conjectures.push_back(c);
  }
  window = std::min(window, stages);
  r.converged = stages - r.stage >= window && r.conjectures.back() && lang_equal(*r.conjectures.back(), target);
  return r;
}

}  // namespace limitlearn

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "limitlearn/character.hpp"
#include "limitlearn/presentation.hpp"
#include "limitlearn/separability.hpp"

namespace limitlearn {

/// A character, or nullopt for the question mark.
using Conjecture = std::optional<Character>;

inline std::string conjecture_to_string(const Conjecture& c) { return c ? c->to_string() : "?"; }

/// Deterministic resettable learner. feed() returns the conjecture after the item.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual void reset() = 0;
  virtual const Conjecture& feed(const Item& item) = 0;
  virtual const Conjecture& current() const = 0;
  virtual std::unique_ptr<Learner> clone() const = 0;
  virtual std::string name() const = 0;
  virtual PresentationKind input_kind() const { return PresentationKind::Informant; }
};

template <class Derived>
class ClonableLearner : public Learner {
 public:
  std::unique_ptr<Learner> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

// ---------------------------------------------------------------------------
// Constant, two-stage, echo

class ConstantLearner : public ClonableLearner<ConstantLearner> {
 public:
  explicit ConstantLearner(Conjecture c) : c_(std::move(c)) {}
  void reset() override {}
  const Conjecture& feed(const Item&) override { return c_; }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "constant(" + conjecture_to_string(c_) + ")"; }

 private:
  Conjecture c_;
};

/// [ω:1] until a negative fact separates two elements, [ω:2] afterwards.
class TwoStageLearner : public ClonableLearner<TwoStageLearner> {
 public:
  TwoStageLearner() { reset(); }
  void reset() override {
    c_ = Character::infinite_classes(1);
    switched_ = false;
  }
  const Conjecture& feed(const Item& item) override {
    if (!switched_ && item.kind == Item::Kind::Negative && item.x != item.y) {
      switched_ = true;
      c_ = Character::infinite_classes(2);
    }
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "two-stage"; }

 private:
  Conjecture c_;
  bool switched_ = false;
};

/// Answers by the parity of the number of items read.
class ParityLearner : public ClonableLearner<ParityLearner> {
 public:
  ParityLearner(Character even, Character odd) : even_(std::move(even)), odd_(std::move(odd)) { reset(); }
  void reset() override {
    n_ = 0;
    c_ = even_;
  }
  const Conjecture& feed(const Item&) override {
    c_ = (++n_ % 2 == 0) ? even_ : odd_;
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "parity"; }

 private:
  Character even_, odd_;
  std::uint64_t n_ = 0;
  Conjecture c_;
};

/// Conjectures the character of A_σ itself.
class EchoLearner : public ClonableLearner<EchoLearner> {
 public:
  EchoLearner() { reset(); }
  void reset() override {
    st_ = PrefixState();
    c_ = Character();
  }
  const Conjecture& feed(const Item& item) override {
    if (st_.push(item)) c_ = st_.character();
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "echo"; }

 private:
  PrefixState st_;
  Conjecture c_;
};

// ---------------------------------------------------------------------------
// Family-based learners

/// Shared state for learners that conjecture family members from A_σ.
class FamilyLearnerBase {
 public:
  explicit FamilyLearnerBase(std::vector<Character> fam) : fam_(std::move(fam)) {
    if (fam_.empty()) throw PreconditionError("empty family");
  }
  const std::vector<Character>& family() const { return fam_; }
  const PrefixState& state() const { return st_; }

 protected:
  std::vector<Character> fam_;
  PrefixState st_;
  std::uint64_t fed_ = 0;
};

/// Learns the ≈fin-type: among members into which A_σ finitely embeds, takes
/// the ↪fin-minimal one of least index and outputs its ≈fin-class
/// representative (least index in the class).
class MLearner : public ClonableLearner<MLearner>, public FamilyLearnerBase {
 public:
  explicit MLearner(std::vector<Character> fam, bool checked = true) : FamilyLearnerBase(std::move(fam)) {
    if (checked) {
      Family{fam_, std::nullopt}.validate();
      if (!fam_.empty() && !has_infinite() && !finitely_separable(fam_).separable)
        throw PreconditionError("M requires a finitely separable family");
    }
    const std::size_t n = fam_.size();
    below_.assign(n, std::vector<bool>(n, false));
    rep_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      rep_[i] = i;
      for (std::size_t j = 0; j < n; ++j) {
        const bool ij = fin_embeds(fam_[i], fam_[j]);
        const bool ji = fin_embeds(fam_[j], fam_[i]);
        below_[i][j] = ij && !ji;  // i strictly below j
        if (ij && ji && j < rep_[i]) rep_[i] = j;
      }
    }
    reset();
  }

  void reset() override {
    st_ = PrefixState();
    fed_ = 0;
    recompute();
  }
  const Conjecture& feed(const Item& item) override {
    if (st_.push(item, fed_++)) recompute();
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "M"; }

  /// Index of the conjectured ≈fin-class representative.
  std::optional<std::size_t> class_rep() const { return cls_; }
  /// Members ≈fin to the representative.
  std::vector<std::size_t> class_members() const {
    std::vector<std::size_t> out;
    if (cls_)
      for (std::size_t i = 0; i < fam_.size(); ++i)
        if (rep_[i] == *cls_) out.push_back(i);
    return out;
  }
  bool push(const Item& item) { return st_.push(item, fed_++); }
  void refresh() { recompute(); }

 private:
  bool has_infinite() const {
    for (const auto& c : fam_)
      if (c.has_infinite_classes()) return true;
    return false;
  }

  void recompute() {
    const Character& sc = st_.character();
    std::vector<std::size_t> cand;
    for (std::size_t i = 0; i < fam_.size(); ++i)
      if (fin_embeds(sc, fam_[i])) cand.push_back(i);
    cls_.reset();
    for (std::size_t i : cand) {
      bool minimal = true;
      for (std::size_t j : cand) minimal = minimal && !below_[j][i];
      if (minimal) {
        cls_ = rep_[i];
        break;
      }
    }
    c_ = cls_ ? Conjecture(fam_[*cls_]) : std::nullopt;
  }

  std::vector<std::vector<bool>> below_;
  std::vector<std::size_t> rep_;
  std::optional<std::size_t> cls_;
  Conjecture c_;
};

namespace detail {

/// min(char(c) \ char(s)) allowing infinite classes: infinite-size components
/// come after all finite ones.
inline std::optional<Component> diff_min_general(const Character& c, const Character& s) {
  const auto strip = [](const Character& x) { return Character(x.default_count(), x.exceptions(), 0); };
  if (auto m = char_diff_min(strip(c), strip(s))) return m;
  if (s.omega_count() < c.omega_count()) return Component{kOmega, s.omega_count().value() + 1};
  return std::nullopt;
}

}  // namespace detail

/// Isomorphism learner: takes M's ≈fin-class and, among its members whose
/// separators are realized by A_σ, outputs the one realized continuously for
/// the longest time (ties by index).
class MStarLearner : public ClonableLearner<MStarLearner> {
 public:
  /// Unchecked mode skips the separability precondition and tolerates
  /// infinite classes (separators then use infinite-size components too).
  explicit MStarLearner(std::vector<Character> fam, bool checked = true) : m_(fam, checked) {
    const auto& f = m_.family();
    if (checked) {
      for (const auto& c : f)
        if (c.has_infinite_classes()) throw PreconditionError("M* requires characters without infinite classes");
    }
    for (const auto& c : f) {
      Separator sep{c, {}};
      for (const auto& s : f)
        if (!iso_eq(s, c) && fin_biembeddable(s, c))
          if (auto d = detail::diff_min_general(c, s)) sep.components.insert(*d);
      seps_.push_back(std::move(sep));
    }
    reset();
  }

  void reset() override {
    m_.reset();
    stage_ = 0;
    since_.assign(seps_.size(), std::nullopt);
    stamps_.clear();
    seen_version_ = ~0ULL;
    update();
  }

  const Conjecture& feed(const Item& item) override {
    ++stage_;
    if (m_.push(item)) {
      m_.refresh();
      update();
    }
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "Mstar"; }
  const std::vector<Separator>& separators() const { return seps_; }

 private:
  void update() {
    const std::uint64_t v = m_.state().version();
    if (v != seen_version_) {
      seen_version_ = v;
      restamp();
      for (std::size_t i = 0; i < seps_.size(); ++i) since_[i] = witnessed_since(seps_[i]);
    }
    std::optional<std::size_t> best;
    for (std::size_t i : m_.class_members())
      if (since_[i] && (!best || *since_[i] < *since_[*best])) best = i;
    c_ = best ? Conjecture(m_.family()[*best]) : std::nullopt;
  }

  // A class keeps its stamp while its size is unchanged; a class that grows
  // or merges is stamped anew. A separator counts as realized since the
  // oldest stamps that witness it, so a witness that later grows stops
  // counting even when a fresh class of the same size replaces it.
  void restamp() {
    std::map<std::uint64_t, std::pair<std::uint32_t, std::uint64_t>> next;
    for (const auto& cl : m_.state().classes()) {
      auto it = stamps_.find(cl.min_name);
      const bool kept = it != stamps_.end() && it->second.first == cl.size;
      next[cl.min_name] = {cl.size, kept ? it->second.second : stage_};
    }
    stamps_ = std::move(next);
  }

  std::optional<std::uint64_t> witnessed_since(const Separator& sep) const {
    std::uint64_t since = 0;
    for (const auto& comp : sep.components) {
      if (comp.size.is_omega()) return std::nullopt;
      std::vector<std::uint64_t> ages;
      for (const auto& [name, st] : stamps_)
        if (st.first == comp.size.value()) ages.push_back(st.second);
      if (ages.size() < comp.index) return std::nullopt;
      std::nth_element(ages.begin(), ages.begin() + static_cast<std::ptrdiff_t>(comp.index - 1), ages.end());
      since = std::max(since, ages[comp.index - 1]);
    }
    return since;
  }

  MLearner m_;
  std::vector<Separator> seps_;
  std::map<std::uint64_t, std::pair<std::uint32_t, std::uint64_t>> stamps_;
  std::vector<std::optional<std::uint64_t>> since_;
  std::uint64_t stage_ = 0;
  std::uint64_t seen_version_ = ~0ULL;
  Conjecture c_;
};

// ---------------------------------------------------------------------------
// Fin learner

namespace detail {

inline Character char_of_sizes(const std::vector<std::uint64_t>& sizes) {
  std::map<std::uint64_t, std::uint64_t> h;
  for (auto s : sizes) ++h[s];
  return char_of_histogram(h);
}

/// Smallest block-size profile (total size, then lexicographic on sizes in
/// descending order) that embeds into fam[idx] and into no other member.
/// Falls back to combining one obstruction per other member.
inline std::vector<std::uint64_t> fin_key(const std::vector<Character>& fam, std::size_t idx,
                                          std::uint64_t search_total = 16) {
  const Character& a = fam[idx];
  std::uint64_t max_part = 1;
  for (const auto& c : fam) max_part = std::max(max_part, c.max_key() + 1);
  auto works = [&](const std::vector<std::uint64_t>& p) {
    const Character pc = char_of_sizes(p);
    if (!fin_embeds(pc, a)) return false;
    for (std::size_t j = 0; j < fam.size(); ++j)
      if (j != idx && fin_embeds(pc, fam[j])) return false;
    return true;
  };
  // Partitions of `total` into parts <= cap, non-increasing, in lexicographic order.
  std::vector<std::uint64_t> cur;
  std::optional<std::vector<std::uint64_t>> found;
  std::function<void(std::uint64_t, std::uint64_t)> gen = [&](std::uint64_t left, std::uint64_t cap) {
    if (found) return;
    if (left == 0) {
      if (works(cur)) found = cur;
      return;
    }
    for (std::uint64_t p = 1; p <= std::min(left, cap) && !found; ++p) {
      cur.push_back(p);
      gen(left - p, p);
      cur.pop_back();
    }
  };
  for (std::uint64_t total = 1; total <= search_total && !found; ++total) gen(total, max_part);
  if (found) return *found;

  // One obstruction per other member: m+1 blocks of size t where B has only m
  // classes of size >= t but A has more.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> need;  // (t, count)
  for (std::size_t j = 0; j < fam.size(); ++j) {
    if (j == idx) continue;
    bool ok = false;
    for (std::uint64_t t : breakpoints(a, fam[j])) {
      const ExtNat ca = cumulative_count(a, t), cb = cumulative_count(fam[j], t);
      if (ca > cb) {
        need.emplace_back(t, cb.value() + 1);
        ok = true;
        break;
      }
    }
    if (!ok) throw PreconditionError("fin learner requires a ↪fin anti-chain");
  }
  std::sort(need.rbegin(), need.rend());
  std::vector<std::uint64_t> p;
  for (auto [t, cnt] : need) {
    const auto have = static_cast<std::uint64_t>(std::count_if(p.begin(), p.end(), [t = t](auto s) { return s >= t; }));
    for (std::uint64_t k = have; k < cnt; ++k) p.push_back(t);
  }
  return p;
}

}  // namespace detail

/// Fin learner: outputs A once K(A) embeds into A_σ with its distinct
/// classes sent to classes that σ explicitly separates; then never changes.
class FinLearner : public ClonableLearner<FinLearner>, public FamilyLearnerBase {
 public:
  explicit FinLearner(std::vector<Character> fam, std::vector<std::vector<std::uint64_t>> keys = {})
      : FamilyLearnerBase(std::move(fam)), keys_(std::move(keys)) {
    Family{fam_, std::nullopt}.validate();
    if (!fin_antichain(fam_)) throw PreconditionError("fin learner requires a ↪fin anti-chain");
    if (keys_.empty())
      for (std::size_t i = 0; i < fam_.size(); ++i) keys_.push_back(detail::fin_key(fam_, i));
    for (auto& k : keys_) std::sort(k.rbegin(), k.rend());
    reset();
  }

  void reset() override {
    st_ = PrefixState();
    fed_ = 0;
    seen_ = ~0ULL;
    c_.reset();
    check();
  }
  const Conjecture& feed(const Item& item) override {
    st_.push(item, fed_++);
    if (!c_) check();
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "fin"; }
  const std::vector<std::vector<std::uint64_t>>& keys() const { return keys_; }

 private:
  void check() {
    if (st_.info_version() == seen_) return;
    seen_ = st_.info_version();
    const auto classes = st_.classes();
    for (std::size_t i = 0; i < fam_.size(); ++i) {
      std::vector<std::uint32_t> used;
      if (place(keys_[i], 0, classes, used)) {
        c_ = fam_[i];
        return;
      }
    }
  }

  bool place(const std::vector<std::uint64_t>& key, std::size_t b, const std::vector<PrefixState::ClassInfo>& cls,
             std::vector<std::uint32_t>& used) const {
    if (b == key.size()) return true;
    for (const auto& c : cls) {
      if (c.size < key[b]) continue;
      bool ok = true;
      for (auto r : used) ok = ok && r != c.root && st_.separated(r, c.root);
      if (!ok) continue;
      used.push_back(c.root);
      if (place(key, b + 1, cls, used)) return true;
      used.pop_back();
    }
    return false;
  }

  std::vector<std::vector<std::uint64_t>> keys_;
  std::uint64_t seen_ = ~0ULL;
  Conjecture c_;
};

// ---------------------------------------------------------------------------
// Text learner and simple baselines

/// Runs an informant learner on the reordering σ̄ of the text read so far.
class TxtLearner : public Learner {
 public:
  explicit TxtLearner(std::unique_ptr<Learner> base) : proto_(std::move(base)) {
    proto_->reset();
    reset();
  }
  TxtLearner(const TxtLearner& o) : proto_(o.proto_->clone()), st_(o.st_), c_(o.c_) {}

  void reset() override {
    st_ = PrefixState();
    c_ = proto_->current();
  }
  const Conjecture& feed(const Item& item) override {
    if (item.kind == Item::Kind::Negative) throw PreconditionError("negative item fed to a text learner");
    if (st_.push(item)) {
      auto run = proto_->clone();
      for (const auto& it : reordered_items(st_)) run->feed(it);
      c_ = run->current();
    }
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::unique_ptr<Learner> clone() const override { return std::make_unique<TxtLearner>(*this); }
  std::string name() const override { return "txt(" + proto_->name() + ")"; }
  PresentationKind input_kind() const override { return PresentationKind::Text; }

 private:
  std::unique_ptr<Learner> proto_;
  PrefixState st_;
  Conjecture c_;
};

/// Picks the member missing the fewest components of A_σ (ties by index).
class CharFitLearner : public ClonableLearner<CharFitLearner>, public FamilyLearnerBase {
 public:
  explicit CharFitLearner(std::vector<Character> fam) : FamilyLearnerBase(std::move(fam)) { reset(); }
  void reset() override {
    st_ = PrefixState();
    fed_ = 0;
    recompute();
  }
  const Conjecture& feed(const Item& item) override {
    if (st_.push(item, fed_++)) recompute();
    return c_;
  }
  const Conjecture& current() const override { return c_; }
  std::string name() const override { return "char-fit"; }

 private:
  void recompute() {
    std::size_t best = 0;
    std::uint64_t best_miss = ~0ULL;
    for (std::size_t i = 0; i < fam_.size(); ++i) {
      std::uint64_t miss = 0;
      for (const auto& [k, n] : st_.size_histogram()) {
        const ExtNat have = fam_[i].count(k);
        if (have.is_finite() && have.value() < n) miss += n - have.value();
      }
      if (miss < best_miss) {
        best = i;
        best_miss = miss;
      }
    }
    c_ = fam_[best];
  }
  Conjecture c_;
};

// ---------------------------------------------------------------------------
// Simulation

enum class Relation { Iso, Biembed, FinBiembed };

inline bool matches(const Conjecture& c, const Character& target, Relation rel) {
  if (!c) return false;
  switch (rel) {
    case Relation::Iso: return iso_eq(*c, target);
    case Relation::Biembed: return biembeddable(*c, target);
    case Relation::FinBiembed: return fin_biembeddable(*c, target);
  }
  return false;
}

struct Trace {
  std::vector<Item> items;
  std::vector<Conjecture> conjectures;  // conjectures[n] is the output after items[n]
  std::vector<std::size_t> ex_mind_changes;
  std::vector<std::size_t> fin_mind_changes;

  void record(const Item& item, const Conjecture& c) {
    const std::size_t n = conjectures.size();
    if (n > 0 && conjectures.back() != c) {
      ex_mind_changes.push_back(n);
      if (conjectures.back().has_value()) fin_mind_changes.push_back(n);
    }
    items.push_back(item);
    conjectures.push_back(c);
  }

  /// Fin shape: some e with {e} ⊆ range ⊆ {e, ?}.
  bool fin_shape(const Character& e) const {
    bool seen = false;
    for (const auto& c : conjectures) {
      if (!c) continue;
      if (!iso_eq(*c, e)) return false;
      seen = true;
    }
    return seen;
  }

  /// One line per stage: "stage <n>: <conjecture> [MC]".
  void write(std::ostream& os) const {
    std::size_t k = 0;
    for (std::size_t n = 0; n < conjectures.size(); ++n) {
      os << "stage " << n << ": " << conjecture_to_string(conjectures[n]);
      if (k < ex_mind_changes.size() && ex_mind_changes[k] == n) {
        os << " MC";
        ++k;
      }
      os << '\n';
    }
  }
};

class StreamExhausted : public std::runtime_error {
 public:
  explicit StreamExhausted(std::size_t at)
      : std::runtime_error("stream exhausted after " + std::to_string(at) + " items"), stage(at) {}
  std::size_t stage;
};

struct SimulationResult {
  Trace trace;
  bool converged = false;
  /// Start of the final constant run.
  std::size_t stage = 0;
  std::size_t mind_changes = 0;

  std::string summary_json() const {
    std::ostringstream os;
    os << "{\"converged\": " << (converged ? "true" : "false") << ", \"stage\": ";
    if (converged)
      os << stage;
    else
      os << "null";
    os << ", \"mind_changes\": " << mind_changes << "}";
    return os.str();
  }
};

/// Converged(t): the conjecture is constant from t to the horizon, that run is
/// at least `window` long, and the final conjecture matches the target.
inline SimulationResult evaluate_trace(Trace trace, const Character& target, Relation rel, std::size_t window) {
  SimulationResult r;
  r.mind_changes = trace.ex_mind_changes.size();
  r.stage = trace.ex_mind_changes.empty() ? 0 : trace.ex_mind_changes.back();
  const std::size_t n = trace.conjectures.size();
  r.converged = n > 0 && n - r.stage >= window && matches(trace.conjectures.back(), target, rel);
  r.trace = std::move(trace);
  return r;
}

inline SimulationResult run_simulation(Learner& learner, PresentationStream& stream, std::size_t stages,
                                       const Character& target, Relation rel = Relation::Iso,
                                       std::size_t window = 200) {
  if (stages == 0) throw PreconditionError("stages must be >= 1");
  learner.reset();
  Trace t;
  t.items.reserve(stages);
  t.conjectures.reserve(stages);
  for (std::size_t n = 0; n < stages; ++n) {
    auto item = stream.next();
    if (!item) throw StreamExhausted(n);
    t.record(*item, learner.feed(*item));
  }
  return evaluate_trace(std::move(t), target, rel, std::min(window, stages));
}

}  // namespace limitlearn

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "limitlearn/character.hpp"
#include "limitlearn/structure.hpp"

namespace limitlearn {

// ---------------------------------------------------------------------------
// Items and prefixes

struct Item {
  enum class Kind : std::uint8_t { Positive, Negative, Pause };

  Kind kind = Kind::Pause;
  std::uint64_t x = 0;
  std::uint64_t y = 0;

  static Item positive(std::uint64_t x, std::uint64_t y) { return {Kind::Positive, x, y}; }
  static Item negative(std::uint64_t x, std::uint64_t y) { return {Kind::Negative, x, y}; }
  static Item pause() { return {}; }

  bool is_pause() const { return kind == Kind::Pause; }
  friend bool operator==(const Item&, const Item&) = default;
};

enum class PresentationKind { Text, Informant };

struct Prefix {
  PresentationKind kind = PresentationKind::Informant;
  std::vector<Item> items;

  friend bool operator==(const Prefix&, const Prefix&) = default;
};

/// An informant prefix labels some pair both related and unrelated.
class InconsistentPrefix : public std::runtime_error {
 public:
  InconsistentPrefix(std::size_t index, const std::string& what)
      : std::runtime_error("item " + std::to_string(index) + ": " + what), item_index(index) {}
  std::size_t item_index;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Incremental decoding of A_σ

/// Incrementally maintains the finite structure encoded by a prefix: the
/// mentioned elements, the closure of the positive facts, and the explicit
/// negative facts between classes.
class PrefixState {
 public:
  struct ClassInfo {
    std::uint32_t root;
    std::uint32_t size;
    std::uint64_t min_name;
  };

  /// Applies one item. Returns true when the finite structure changed (a new
  /// element or a merge). Throws InconsistentPrefix on contradiction.
  bool push(const Item& item, std::size_t index = 0) {
    if (item.is_pause()) return false;
    const std::uint64_t before = version_;
    const std::uint32_t a = intern(item.x);
    const std::uint32_t b = intern(item.y);
    std::uint32_t ra = find(a);
    std::uint32_t rb = find(b);
    if (item.kind == Item::Kind::Positive) {
      if (ra != rb) {
        if (neg_[ra].count(rb)) throw InconsistentPrefix(index, "positive fact contradicts an earlier negative one");
        unite(ra, rb);
      }
    } else {
      if (ra == rb) throw InconsistentPrefix(index, "negative fact between related elements");
      if (neg_[ra].insert(rb).second) {
        neg_[rb].insert(ra);
        ++info_version_;
      }
    }
    return version_ != before;
  }

  /// Bumped on every structural change.
  std::uint64_t version() const { return version_; }
  /// Bumped on structural changes and on new explicit separations.
  std::uint64_t info_version() const { return info_version_ + version_; }

  std::size_t element_count() const { return names_.size(); }
  std::size_t class_count() const { return class_count_; }
  const std::map<std::uint64_t, std::uint64_t>& size_histogram() const { return hist_; }

  const Character& character() const {
    if (!char_cache_ || char_version_ != version_) {
      char_cache_ = char_of_histogram(hist_);
      char_version_ = version_;
    }
    return *char_cache_;
  }

  std::optional<std::uint32_t> id_of(std::uint64_t name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  std::uint64_t name_of(std::uint32_t id) const { return names_[id]; }
  std::uint32_t find(std::uint32_t x) const {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  std::uint32_t class_size(std::uint32_t root) const { return size_[root]; }
  bool same_class(std::uint64_t x, std::uint64_t y) const {
    auto a = id_of(x), b = id_of(y);
    return a && b && find(*a) == find(*b);
  }
  bool separated(std::uint32_t ra, std::uint32_t rb) const { return neg_[ra].count(rb) != 0; }
  std::uint64_t max_name() const { return max_name_; }

  std::vector<ClassInfo> classes() const {
    std::vector<ClassInfo> out;
    for (std::uint32_t i = 0; i < parent_.size(); ++i)
      if (parent_[i] == i) out.push_back({i, size_[i], min_name_[i]});
    std::sort(out.begin(), out.end(), [](const ClassInfo& a, const ClassInfo& b) { return a.min_name < b.min_name; });
    return out;
  }

  /// Members of each class as element names, classes ordered by least member.
  std::vector<std::vector<std::uint64_t>> class_members() const {
    std::map<std::uint32_t, std::vector<std::uint64_t>> by_root;
    for (std::uint32_t i = 0; i < names_.size(); ++i) by_root[find(i)].push_back(names_[i]);
    std::vector<std::vector<std::uint64_t>> out;
    for (auto& [r, v] : by_root) {
      std::sort(v.begin(), v.end());
      out.push_back(std::move(v));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint32_t intern(std::uint64_t name) {
    auto [it, fresh] = ids_.try_emplace(name, static_cast<std::uint32_t>(names_.size()));
    if (fresh) {
      names_.push_back(name);
      parent_.push_back(it->second);
      size_.push_back(1);
      min_name_.push_back(name);
      neg_.emplace_back();
      ++hist_[1];
      ++class_count_;
      ++version_;
      if (names_.size() == 1 || name > max_name_) max_name_ = name;
    }
    return it->second;
  }

  void unite(std::uint32_t ra, std::uint32_t rb) {
    if (size_[ra] < size_[rb]) std::swap(ra, rb);
    dec(size_[ra]);
    dec(size_[rb]);
    parent_[rb] = ra;
    size_[ra] += size_[rb];
    ++hist_[size_[ra]];
    min_name_[ra] = std::min(min_name_[ra], min_name_[rb]);
    if (neg_[rb].size() > neg_[ra].size()) std::swap(neg_[ra], neg_[rb]);
    for (std::uint32_t r : neg_[rb]) {
      neg_[r].erase(rb);
      neg_[r].insert(ra);
      neg_[ra].insert(r);
    }
    // After a swap, ra's old neighbours still point at ra, which is correct.
    neg_[rb].clear();
    --class_count_;
    ++version_;
  }

  void dec(std::uint32_t size) {
    auto it = hist_.find(size);
    if (--it->second == 0) hist_.erase(it);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> ids_;
  std::vector<std::uint64_t> names_;
  mutable std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::vector<std::uint64_t> min_name_;
  std::vector<std::unordered_set<std::uint32_t>> neg_;
  std::map<std::uint64_t, std::uint64_t> hist_;
  std::size_t class_count_ = 0;
  std::uint64_t max_name_ = 0;
  std::uint64_t version_ = 0;
  std::uint64_t info_version_ = 0;
  mutable std::optional<Character> char_cache_;
  mutable std::uint64_t char_version_ = 0;
};

struct DecodedPrefix {
  FiniteStructure structure;
  /// Original element name to its index in {0..n-1} (names in ascending order).
  std::map<std::uint64_t, std::uint32_t> name_map;
};

inline PrefixState state_of(const Prefix& p) {
  PrefixState st;
  for (std::size_t i = 0; i < p.items.size(); ++i) {
    if (p.kind == PresentationKind::Text && p.items[i].kind == Item::Kind::Negative)
      throw InconsistentPrefix(i, "negative fact in a text");
    st.push(p.items[i], i);
  }
  return st;
}

/// A_σ: mentioned elements, closure of the positive facts, all else unrelated.
inline DecodedPrefix structure_from_prefix(const Prefix& p) {
  const PrefixState st = state_of(p);
  DecodedPrefix out;
  std::vector<std::uint64_t> names;
  for (const auto& cls : st.class_members()) names.insert(names.end(), cls.begin(), cls.end());
  std::sort(names.begin(), names.end());
  for (std::uint32_t i = 0; i < names.size(); ++i) out.name_map[names[i]] = i;
  std::vector<FiniteStructure::Block> blocks;
  for (const auto& cls : st.class_members()) {
    FiniteStructure::Block b;
    for (auto n : cls) b.push_back(out.name_map[n]);
    blocks.push_back(std::move(b));
  }
  out.structure = FiniteStructure(static_cast<std::uint32_t>(names.size()), std::move(blocks));
  return out;
}

// ---------------------------------------------------------------------------
// Text to informant reordering

/// σ̄ for the classes currently known in `st`: positives of each class (by
/// least member), each followed by the assumed negatives against all earlier
/// classes. Pairs are listed in lexicographic order.
inline std::vector<Item> reordered_items(const PrefixState& st) {
  std::vector<Item> out;
  const auto classes = st.class_members();
  for (std::size_t j = 0; j < classes.size(); ++j) {
    const auto& cls = classes[j];
    for (auto x : cls)
      for (auto y : cls) out.push_back(Item::positive(x, y));
    if (j == 0) continue;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> neg;
    for (std::size_t i = 0; i < j; ++i)
      for (auto x : cls)
        for (auto y : classes[i]) {
          neg.emplace_back(x, y);
          neg.emplace_back(y, x);
        }
    std::sort(neg.begin(), neg.end());
    for (auto [x, y] : neg) out.push_back(Item::negative(x, y));
  }
  return out;
}

inline Prefix reorder_to_informant(const Prefix& text) {
  if (text.kind != PresentationKind::Text) throw PreconditionError("reorder_to_informant expects a text prefix");
  return Prefix{PresentationKind::Informant, reordered_items(state_of(text))};
}

// ---------------------------------------------------------------------------
// Class schedules

/// Knobs for the fair presentations. The defaults give the plain fair
/// stream; the others produce reordered variants of it.
struct StreamOptions {
  std::uint64_t seed = 0;
  /// Number of classes filled concurrently (1 = one class at a time).
  unsigned open_blocks = 1;
  /// Reverse each round's task list after shuffling.
  bool reverse_rounds = false;
  /// If nonzero, element names are permuted within consecutive windows of this size.
  std::uint64_t rename_window = 0;
};

/// Assigns elements 0,1,2,... to classes so that, in the limit, the classes
/// realize a given character. Work proceeds in rounds; each round opens one
/// more instance of every size still owed, activates the next default size,
/// grows each infinite class by one element and opens one more infinite class
/// while owed. Round tasks are shuffled by the seed.
class ClassSchedule {
 public:
  ClassSchedule(const Character& c, const StreamOptions& opt)
      : c_(c), rng_(opt.seed), open_limit_(std::max(1u, opt.open_blocks)), reverse_(opt.reverse_rounds) {
    for (const auto& [k, v] : c.exceptions())
      if (!v.is_zero()) entries_.push_back({k, v, 0});
  }

  /// Class id of the next element, or nullopt once a finite character is exhausted.
  std::optional<std::uint32_t> next() {
    while (open_.size() < open_limit_) {
      if (queue_.empty() && !plan_round()) break;
      if (queue_.empty()) break;
      open_.push_back(queue_.front());
      queue_.pop_front();
    }
    if (open_.empty()) return std::nullopt;
    const std::size_t pick = open_.size() == 1 ? 0 : static_cast<std::size_t>(rng_() % open_.size());
    Task& t = open_[pick];
    const std::uint32_t id = t.class_id;
    if (--t.remaining == 0) open_.erase(open_.begin() + static_cast<std::ptrdiff_t>(pick));
    return id;
  }

  /// True when no class is part-way through its planned block.
  bool at_block_boundary() const { return open_.empty(); }

  std::uint32_t classes_created() const { return next_class_; }

 private:
  struct Entry {
    std::uint64_t size;
    ExtNat count;
    std::uint64_t created;
  };
  struct Task {
    std::uint32_t class_id;
    std::uint64_t remaining;
  };

  bool plan_round() {
    std::vector<Task> tasks;
    if (!c_.default_count().is_zero()) {
      while (c_.exceptions().count(next_default_size_)) ++next_default_size_;
      entries_.push_back({next_default_size_++, c_.default_count(), 0});
    }
    for (auto& e : entries_) {
      if (ExtNat(e.created) >= e.count) continue;
      ++e.created;
      tasks.push_back({next_class_++, e.size});
    }
    for (auto id : infinite_) tasks.push_back({id, 1});
    if (ExtNat(infinite_.size()) < c_.omega_count()) {
      infinite_.push_back(next_class_);
      tasks.push_back({next_class_++, 1});
    }
    if (tasks.empty()) return false;
    for (std::size_t i = tasks.size(); i > 1; --i)
      std::swap(tasks[i - 1], tasks[static_cast<std::size_t>(rng_() % i)]);
    if (reverse_) std::reverse(tasks.begin(), tasks.end());
    queue_.insert(queue_.end(), tasks.begin(), tasks.end());
    return true;
  }

  Character c_;
  std::mt19937_64 rng_;
  std::size_t open_limit_;
  bool reverse_;
  std::vector<Entry> entries_;
  std::uint64_t next_default_size_ = 1;
  std::vector<std::uint32_t> infinite_;
  std::uint32_t next_class_ = 0;
  std::deque<Task> queue_;
  std::vector<Task> open_;
};

/// Appends the labels introducing element z: a link to the oldest member of
/// its class (so no transient extra class appears), (z,z), then (y,z),(z,y)
/// for the remaining y < z. With `text`, negative labels become pauses.
template <class NameFn>
void append_element_items(std::vector<Item>& out, std::uint32_t z, const std::vector<std::uint32_t>& class_of,
                          NameFn name, bool text) {
  const std::uint64_t nz = name(z);
  std::uint32_t first = 0;
  while (first < z && class_of[first] != class_of[z]) ++first;
  if (first < z) {
    out.push_back(Item::positive(name(first), nz));
    out.push_back(Item::positive(nz, name(first)));
  }
  out.push_back(Item::positive(nz, nz));
  for (std::uint32_t y = 0; y < z; ++y) {
    if (y == first) continue;
    const std::uint64_t ny = name(y);
    if (class_of[y] == class_of[z]) {
      out.push_back(Item::positive(ny, nz));
      out.push_back(Item::positive(nz, ny));
    } else if (text) {
      out.push_back(Item::pause());
      out.push_back(Item::pause());
    } else {
      out.push_back(Item::negative(ny, nz));
      out.push_back(Item::negative(nz, ny));
    }
  }
}

/// Permutes names within consecutive windows, deterministically from a seed.
class WindowRenamer {
 public:
  WindowRenamer(std::uint64_t window, std::uint64_t seed) : window_(window), seed_(seed) {}

  std::uint64_t operator()(std::uint64_t z) const {
    if (window_ == 0) return z;
    const std::uint64_t chunk = z / window_;
    auto it = perms_.find(chunk);
    if (it == perms_.end()) {
      std::vector<std::uint64_t> p(window_);
      for (std::uint64_t i = 0; i < window_; ++i) p[i] = i;
      std::mt19937_64 rng(seed_ ^ (0x9E3779B97F4A7C15ULL * (chunk + 1)));
      for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[static_cast<std::size_t>(rng() % i)]);
      it = perms_.emplace(chunk, std::move(p)).first;
    }
    return chunk * window_ + it->second[z % window_];
  }

 private:
  std::uint64_t window_;
  std::uint64_t seed_;
  mutable std::map<std::uint64_t, std::vector<std::uint64_t>> perms_;
};

// ---------------------------------------------------------------------------
// Streams

class PresentationStream {
 public:
  virtual ~PresentationStream() = default;
  /// Next item, or nullopt if the stream is exhausted.
  virtual std::optional<Item> next() = 0;
  virtual PresentationKind kind() const = 0;
};

/// Seeded fair presentation of a character: elements are introduced one at
/// a time in schedule order, each with its labels against all earlier ones.
/// A finite character's informant cycles through its pairs again once every
/// element is out; its text pauses forever.
class FairStream : public PresentationStream {
 public:
  FairStream(const Character& c, PresentationKind kind, StreamOptions opt = {})
      : kind_(kind), schedule_(c, opt), rename_(opt.rename_window, opt.seed) {
    if (c.empty()) throw PreconditionError("cannot present the empty character");
  }

  std::optional<Item> next() override {
    while (pos_ >= pending_.size()) {
      pending_.clear();
      pos_ = 0;
      refill();
    }
    return pending_[pos_++];
  }

  PresentationKind kind() const override { return kind_; }

 private:
  void refill() {
    const bool text = kind_ == PresentationKind::Text;
    if (!exhausted_) {
      if (auto cls = schedule_.next()) {
        class_of_.push_back(*cls);
        append_element_items(pending_, static_cast<std::uint32_t>(class_of_.size() - 1), class_of_, rename_, text);
        return;
      }
      exhausted_ = true;
    }
    if (text) {
      pending_.push_back(Item::pause());
      return;
    }
    append_element_items(pending_, replay_, class_of_, rename_, false);
    replay_ = (replay_ + 1) % static_cast<std::uint32_t>(class_of_.size());
  }

  PresentationKind kind_;
  ClassSchedule schedule_;
  WindowRenamer rename_;
  std::vector<std::uint32_t> class_of_;
  std::vector<Item> pending_;
  std::size_t pos_ = 0;
  bool exhausted_ = false;
  std::uint32_t replay_ = 0;
};

inline std::unique_ptr<PresentationStream> fair_informant(const Character& c, std::uint64_t seed) {
  return std::make_unique<FairStream>(c, PresentationKind::Informant, StreamOptions{seed});
}
inline std::unique_ptr<PresentationStream> fair_text(const Character& c, std::uint64_t seed) {
  return std::make_unique<FairStream>(c, PresentationKind::Text, StreamOptions{seed});
}

/// Five reorderings of the fair stream: concurrent class filling, reversed
/// rounds and renamed elements, in combination.
inline std::vector<StreamOptions> adversarial_reorders(std::uint64_t seed) {
  return {
      StreamOptions{seed, 2, false, 0},
      StreamOptions{seed, 3, false, 0},
      StreamOptions{seed, 1, true, 16},
      StreamOptions{seed, 2, true, 8},
      StreamOptions{seed, 4, false, 32},
  };
}

/// Replays a fixed list of items.
class ReplayStream : public PresentationStream {
 public:
  explicit ReplayStream(Prefix p) : prefix_(std::move(p)) {}
  std::optional<Item> next() override {
    if (pos_ >= prefix_.items.size()) return std::nullopt;
    return prefix_.items[pos_++];
  }
  PresentationKind kind() const override { return prefix_.kind; }

 private:
  Prefix prefix_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Trace/replay file format: one item per line, "P x y", "N x y" or "#".

inline void write_items(std::ostream& os, const std::vector<Item>& items) {
  for (const auto& it : items) {
    switch (it.kind) {
      case Item::Kind::Positive: os << "P " << it.x << ' ' << it.y << '\n'; break;
      case Item::Kind::Negative: os << "N " << it.x << ' ' << it.y << '\n'; break;
      case Item::Kind::Pause: os << "#\n"; break;
    }
  }
}

inline std::vector<Item> read_items(std::istream& is) {
  std::vector<Item> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line == "#") {
      out.push_back(Item::pause());
      continue;
    }
    std::istringstream ls(line);
    std::string tag, rest;
    std::uint64_t x = 0, y = 0;
    if (!(ls >> tag >> x >> y) || (tag != "P" && tag != "N") || (ls >> rest))
      throw ParseError("line " + std::to_string(lineno) + ": expected 'P x y', 'N x y' or '#'");
    out.push_back(tag == "P" ? Item::positive(x, y) : Item::negative(x, y));
  }
  return out;
}

inline std::string items_to_string(const std::vector<Item>& items) {
  std::ostringstream os;
  write_items(os, items);
  return os.str();
}

}  // namespace limitlearn

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "limitlearn/character.hpp"

namespace limitlearn {

/// A finite equivalence relation on {0..n-1}, stored as its partition.
class FiniteStructure {
 public:
  using Block = std::vector<std::uint32_t>;

  FiniteStructure() = default;

  /// Blocks are sorted internally; throws unless they partition {0..n-1}.
  FiniteStructure(std::uint32_t n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
    std::vector<bool> seen(n, false);
    std::uint32_t covered = 0;
    for (auto& b : blocks_) {
      if (b.empty()) throw RepresentationError("empty block in partition");
      std::sort(b.begin(), b.end());
      for (auto x : b) {
        if (x >= n || seen[x]) throw RepresentationError("blocks are not a partition of {0..n-1}");
        seen[x] = true;
        ++covered;
      }
    }
    if (covered != n) throw RepresentationError("blocks do not cover {0..n-1}");
    std::sort(blocks_.begin(), blocks_.end());
  }

  /// Consecutive blocks of the given sizes: {0..s0-1}, {s0..s0+s1-1}, ...
  static FiniteStructure from_block_sizes(const std::vector<std::uint32_t>& sizes) {
    std::vector<Block> blocks;
    std::uint32_t next = 0;
    for (auto s : sizes) {
      Block b;
      for (std::uint32_t j = 0; j < s; ++j) b.push_back(next++);
      blocks.push_back(std::move(b));
    }
    return FiniteStructure(next, std::move(blocks));
  }

  std::uint32_t size() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  bool related(std::uint32_t x, std::uint32_t y) const {
    for (const auto& b : blocks_)
      if (std::binary_search(b.begin(), b.end(), x)) return std::binary_search(b.begin(), b.end(), y);
    return false;
  }

  friend bool operator==(const FiniteStructure&, const FiniteStructure&) = default;

 private:
  std::uint32_t n_ = 0;
  std::vector<Block> blocks_;
};

inline Character char_of_histogram(const std::map<std::uint64_t, std::uint64_t>& sizes) {
  Character::Exceptions ex;
  for (const auto& [k, v] : sizes)
    if (v != 0) ex[k] = ExtNat(v);
  return Character(0, std::move(ex), 0);
}

inline Character char_of_finite(const FiniteStructure& f) {
  std::map<std::uint64_t, std::uint64_t> hist;
  for (const auto& b : f.blocks()) ++hist[b.size()];
  return char_of_histogram(hist);
}

}  // namespace limitlearn

// Copyright 2026 The losstree Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOSSTREE_TREE_HPP
#define LOSSTREE_TREE_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "losstree/analytics.hpp"

namespace losstree {

/// Explicit leveled tree built from a branching vector.
///
/// Vertices are numbered level by level (breadth first), so the children of
/// any vertex occupy a contiguous index range and level 1 is [0, b0). The
/// logical qubit the first level hangs off is virtual and not stored.
class TreeGraph {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  TreeGraph() = default;

  explicit TreeGraph(BranchingVector shape, std::uint64_t max_vertices = 1ULL << 26) : shape_(std::move(shape)) {
    const std::uint64_t total = qubit_count(shape_);
    if (total > max_vertices) throw CapacityError("tree has too many vertices to materialize");
    const std::size_t n = static_cast<std::size_t>(total);
    level_.reserve(n);
    parent_.reserve(n);
    first_child_.assign(n, 0);
    child_count_.assign(n, 0);
    level_start_.push_back(0);

    for (int i = 0; i < shape_[0]; ++i) {
      level_.push_back(1);
      parent_.push_back(kNoParent);
    }
    level_start_.push_back(level_.size());
    for (std::size_t depth = 1; depth < shape_.size(); ++depth) {
      const std::size_t begin = level_start_[depth - 1];
      const std::size_t end = level_start_[depth];
      const int branch = shape_[depth];
      for (std::size_t v = begin; v < end; ++v) {
        first_child_[v] = level_.size();
        child_count_[v] = static_cast<std::size_t>(branch);
        for (int c = 0; c < branch; ++c) {
          level_.push_back(static_cast<int>(depth + 1));
          parent_.push_back(v);
        }
      }
      level_start_.push_back(level_.size());
    }
    for (std::size_t v = level_start_[shape_.size() - 1]; v < n; ++v) first_child_[v] = n;
  }

  [[nodiscard]] const BranchingVector& shape() const noexcept { return shape_; }
  [[nodiscard]] std::size_t size() const noexcept { return level_.size(); }
  [[nodiscard]] std::size_t levels() const noexcept { return shape_.size(); }

  /// Level tag in 1 ... m+1.
  [[nodiscard]] int level(std::size_t v) const { return level_[v]; }
  [[nodiscard]] std::size_t parent(std::size_t v) const { return parent_[v]; }
  [[nodiscard]] std::size_t child_begin(std::size_t v) const { return first_child_[v]; }
  [[nodiscard]] std::size_t child_end(std::size_t v) const { return first_child_[v] + child_count_[v]; }
  [[nodiscard]] std::size_t child_count(std::size_t v) const { return child_count_[v]; }

  /// Population of level k (1-based) as a half-open vertex range.
  [[nodiscard]] std::size_t level_begin(int k) const { return level_start_[static_cast<std::size_t>(k - 1)]; }
  [[nodiscard]] std::size_t level_end(int k) const { return level_start_[static_cast<std::size_t>(k)]; }

  /// All proper descendants of v, in increasing index order.
  [[nodiscard]] std::vector<std::size_t> descendants(std::size_t v) const {
    std::vector<std::size_t> out;
    std::size_t lo = child_begin(v), hi = child_end(v);
    while (lo < hi) {
      for (std::size_t u = lo; u < hi; ++u) out.push_back(u);
      const std::size_t next_lo = first_child_[lo];
      const std::size_t next_hi = child_end(hi - 1);
      if (child_count_[lo] == 0) break;
      lo = next_lo;
      hi = next_hi;
    }
    return out;
  }

 private:
  BranchingVector shape_;
  std::vector<int> level_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> first_child_;
  std::vector<std::size_t> child_count_;
  std::vector<std::size_t> level_start_;
};

inline TreeGraph build_tree(const BranchingVector& b) { return TreeGraph(b); }

/// Per-vertex lost flags for one trial.
struct LossPattern {
  std::vector<std::uint8_t> lost;

  LossPattern() = default;
  explicit LossPattern(std::size_t n, bool all_lost = false) : lost(n, all_lost ? 1 : 0) {}

  [[nodiscard]] bool operator()(std::size_t v) const { return lost[v] != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return lost.size(); }
};

}  // namespace losstree

#endif  // LOSSTREE_TREE_HPP

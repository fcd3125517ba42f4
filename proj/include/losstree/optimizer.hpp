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

#ifndef LOSSTREE_OPTIMIZER_HPP
#define LOSSTREE_OPTIMIZER_HPP

// Minimal-qubit tree search.
//
// The success probability of a tree only depends on the first-level width b0
// and on the LevelState of a first-level qubit, and a LevelState only depends
// on the branching suffix below it. The exhaustive search therefore builds
// suffixes bottom up, one level per round, and keeps only suffixes that are
// not dominated: suffix s1 makes s2 redundant when
//
//   rbar1 <= rbar2, cbar1 <= cbar2, N1 <= N2, len(s1) <= len(s2)
//
// (N = descendants of the suffix's top qubit), and on N1 == N2 when s1 also
// precedes s2 in (length, lexicographic) order. Every completion of s2 is then
// matched by the same completion of s1, which is at least as successful, no
// larger, and no later in the tie order. Suffixes whose N already reaches the
// incumbent's Q are dropped, since any tree containing them has Q > N.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "losstree/analytics.hpp"
#include "losstree/error.hpp"
#include "losstree/parallel.hpp"

namespace losstree {

struct SearchBounds {
  int max_depth = 8;
  int max_branch = 60;
  std::uint64_t max_qubits = 1'000'000'000;

  void validate() const {
    if (max_depth < 0) throw InvalidInput("max_depth must be >= 0");
    if (max_branch < 1) throw InvalidInput("max_branch must be >= 1");
    if (max_branch > 4096) throw InvalidInput("max_branch must be <= 4096");
    if (max_depth > 64) throw InvalidInput("max_depth must be <= 64");
    if (max_qubits < 1) throw InvalidInput("max_qubits must be >= 1");
  }
};

enum class SearchMode {
  exhaustive,
  /// Scans only vectors (b0, c, c, ..., c). Fast, but not guaranteed minimal.
  heuristic,
};

struct OptimizationResult {
  bool feasible = false;
  std::optional<BranchingVector> best;
  std::uint64_t Q = 0;
  double achieved_eps_eff = 1.0;
  std::uint64_t evaluated = 0;
  double eps0 = 0.0;
  double target_eps_eff = 0.0;
  SearchMode mode = SearchMode::exhaustive;
};

/// Strict-improvement margin used by threshold_probe.
inline constexpr double kThresholdMargin = 1e-9;

namespace detail {

// Lower bound on eps_eff over every tree, whatever its shape or size.
//
// For eps >= 1/2 each level satisfies R + C <= 1: the leaf has (0, 1), and
// from a child with R' + C' <= 1 the parent gets
//   R + C <= 1 - (1 - (1-eps) C')^b + (1 - eps C')^b <= 1.
// Then with r = R_1, x = 1 - eps + eps r, y = eps r <= r and x <= 1,
//   P = (1-eps) (sum_{i<b0} x^(b0-1-i) y^i) C_1 <= (1-eps) (1-r) / (1 - eps r) <= 1 - eps,
// so eps_eff >= eps. Below 1/2 there is no shape-independent floor.
inline double completion_eps_floor(double eps) { return eps >= 0.5 ? eps : 0.0; }

struct Incumbent {
  bool found = false;
  std::uint64_t Q = 0;
  std::vector<int> b;

  // Total order (Q, depth, lexicographic).
  [[nodiscard]] bool beaten_by(std::uint64_t q, const std::vector<int>& cand) const {
    if (!found) return true;
    if (q != Q) return q < Q;
    if (cand.size() != b.size()) return cand.size() < b.size();
    return cand < b;
  }
};

// Suffixes share storage: a suffix is its top branching value followed by
// another (already stored) suffix.
struct SuffixNode {
  int head = 0;
  std::uint32_t rest = 0;  // index into the pool; 0 is the empty suffix
};

struct Suffix {
  LevelState state;
  std::uint64_t n = 0;     // descendants of the suffix's top qubit
  std::uint32_t self = 0;  // pool index once stored
  std::uint32_t rest = 0;
  std::uint16_t len = 0;
  int head = 0;
};

class SuffixPool {
 public:
  SuffixPool() : nodes_(1) {}

  std::uint32_t store(int head, std::uint32_t rest) {
    nodes_.push_back({head, rest});
    return static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  // (N, length, lexicographic) order.
  [[nodiscard]] bool less(const Suffix& a, const Suffix& b) const {
    if (a.n != b.n) return a.n < b.n;
    if (a.len != b.len) return a.len < b.len;
    if (a.head != b.head) return a.head < b.head;
    std::uint32_t x = a.rest, y = b.rest;
    while (x != y) {
      if (nodes_[x].head != nodes_[y].head) return nodes_[x].head < nodes_[y].head;
      x = nodes_[x].rest;
      y = nodes_[y].rest;
    }
    return false;
  }

  void append(std::uint32_t node, std::vector<int>& out) const {
    for (; node != 0; node = nodes_[node].rest) out.push_back(nodes_[node].head);
  }

 private:
  std::vector<SuffixNode> nodes_;
};

// Pareto staircase over (rbar, cbar), both minimized: keys ascending with
// values strictly descending.
class Staircase {
 public:
  [[nodiscard]] bool dominated(double rbar, double cbar) const {
    auto it = pts_.upper_bound(rbar);
    if (it == pts_.begin()) return false;
    --it;
    return it->second <= cbar;
  }

  void insert(double rbar, double cbar) {
    if (dominated(rbar, cbar)) return;
    auto it = pts_.lower_bound(rbar);
    while (it != pts_.end() && it->second >= cbar) it = pts_.erase(it);
    pts_[rbar] = cbar;
  }

 private:
  std::map<double, double> pts_;
};

class TreeSearch {
 public:
  TreeSearch(double eps, double target, const SearchBounds& bounds) : eps_(eps), target_(target), bounds_(bounds) {}

  void seed(std::uint64_t q, std::vector<int> b) {
    if (inc_.beaten_by(q, b)) {
      inc_.found = true;
      inc_.Q = q;
      inc_.b = std::move(b);
    }
  }

  void run() {
    std::vector<Suffix> front{Suffix{}};
    check_top(front.front());
    if (completion_eps_floor(eps_) > target_) return;
    std::vector<Suffix> newest = front;
    const auto order = [this](const Suffix& a, const Suffix& b) { return pool_.less(a, b); };
    for (int round = 1; round <= bounds_.max_depth && !newest.empty(); ++round) {
      std::erase_if(front, [&](const Suffix& s) { return s.n >= n_limit(); });

      // Extensions of each parent come out in increasing N as b grows, so a
      // k-way merge yields all candidates in (N, length, lex) order without
      // materializing them.
      struct Pending {
        Suffix cand;
        std::size_t parent;
      };
      const auto later = [this](const Pending& a, const Pending& b) { return pool_.less(b.cand, a.cand); };
      std::priority_queue<Pending, std::vector<Pending>, decltype(later)> heap(later);
      const auto push = [&](std::size_t parent, int b) {
        const Suffix& s = newest[parent];
        if (b > bounds_.max_branch) return;
        const std::uint64_t n2 = static_cast<std::uint64_t>(b) * (1 + s.n);
        if (n2 >= n_limit()) return;
        Suffix c;
        c.state = parent_state(eps_, b, s.state);
        c.n = n2;
        c.head = b;
        c.rest = s.self;
        c.len = static_cast<std::uint16_t>(s.len + 1);
        heap.push({c, parent});
      };
      for (std::size_t p = 0; p < newest.size(); ++p) push(p, 1);

      // Old suffixes are all shorter than the candidates, so anything already
      // on the staircase may prune the candidate being visited.
      Staircase stairs;
      std::vector<Suffix> kept;
      std::size_t i = 0;
      while (!heap.empty()) {
        auto [c, parent] = heap.top();
        heap.pop();
        push(parent, c.head + 1);
        while (i < front.size() && !order(c, front[i])) {
          stairs.insert(front[i].state.rbar, front[i].state.cbar);
          ++i;
        }
        if (c.n >= n_limit() || stairs.dominated(c.state.rbar, c.state.cbar)) continue;
        stairs.insert(c.state.rbar, c.state.cbar);
        c.self = pool_.store(c.head, c.rest);
        check_top(c);
        kept.push_back(c);
      }
      front.insert(front.end(), kept.begin(), kept.end());
      std::sort(front.begin(), front.end(), order);
      newest = std::move(kept);
    }
  }

  [[nodiscard]] const Incumbent& incumbent() const { return inc_; }
  [[nodiscard]] std::uint64_t evaluated() const { return evaluated_; }

 private:
  [[nodiscard]] std::uint64_t n_limit() const { return inc_.found ? inc_.Q : bounds_.max_qubits; }

  void check_top(const Suffix& s) {
    std::vector<int> full;
    for (int b0 = 1; b0 <= bounds_.max_branch; ++b0) {
      const std::uint64_t q = static_cast<std::uint64_t>(b0) * (1 + s.n);
      if (q > bounds_.max_qubits || (inc_.found && q > inc_.Q)) break;
      ++evaluated_;
      if (top_level(eps_, b0, s.state).eps_eff > target_) continue;
      full.assign(1, b0);
      pool_.append(s.self, full);
      seed(q, full);
      break;
    }
  }

  double eps_;
  double target_;
  SearchBounds bounds_;
  Incumbent inc_;
  SuffixPool pool_;
  std::uint64_t evaluated_ = 0;
};

inline void validate_target(double target) {
  if (!(target > 0.0 && target < 1.0)) throw InvalidInput("target eps_eff must lie in (0, 1)");
}

inline OptimizationResult finish(OptimizationResult r, const Incumbent& inc, LossRate eps0) {
  if (!inc.found) return r;
  BranchingVector best(inc.b);
  const auto report = logical_success(best, eps0);
  // Post-hoc soundness check against the reference evaluation.
  if (!(report.eps_eff <= r.target_eps_eff)) return r;
  r.feasible = true;
  r.Q = qubit_count(best);
  r.achieved_eps_eff = report.eps_eff;
  r.best = std::move(best);
  return r;
}

// Best (b0, c, ..., c) vector; used standalone and to seed the exhaustive search.
inline Incumbent uniform_scan(double eps, double target, const SearchBounds& bounds, std::uint64_t& evaluated) {
  Incumbent inc;
  const auto try_suffix = [&](const LevelState& s, std::uint64_t n, const std::vector<int>& suffix) {
    for (int b0 = 1; b0 <= bounds.max_branch; ++b0) {
      const std::uint64_t q = static_cast<std::uint64_t>(b0) * (1 + n);
      if (q > bounds.max_qubits || (inc.found && q > inc.Q)) break;
      ++evaluated;
      if (top_level(eps, b0, s).eps_eff > target) continue;
      std::vector<int> full{b0};
      full.insert(full.end(), suffix.begin(), suffix.end());
      if (inc.beaten_by(q, full)) inc = Incumbent{true, q, std::move(full)};
      break;
    }
  };
  try_suffix(LevelState{}, 0, {});
  for (int c = 1; c <= bounds.max_branch; ++c) {
    LevelState s{};
    std::uint64_t n = 0;
    std::vector<int> suffix;
    for (int depth = 1; depth <= bounds.max_depth; ++depth) {
      s = parent_state(eps, c, s);
      n = static_cast<std::uint64_t>(c) * (1 + n);
      suffix.push_back(c);
      if (n >= bounds.max_qubits) break;
      try_suffix(s, n, suffix);
    }
  }
  return inc;
}

}  // namespace detail

/// Minimal-Q branching vector with eps_eff <= target within `bounds`. Ties are
/// broken by depth, then lexicographically.
inline OptimizationResult optimize_tree(LossRate eps0, double target_eps_eff, const SearchBounds& bounds = {},
                                        SearchMode mode = SearchMode::exhaustive) {
  detail::validate_target(target_eps_eff);
  bounds.validate();
  OptimizationResult result;
  result.eps0 = eps0.value();
  result.target_eps_eff = target_eps_eff;
  result.mode = mode;
  const double eps = eps0.value();

  if (eps <= target_eps_eff) {
    // A single qubit already meets the target and nothing is smaller.
    result.evaluated = 1;
    detail::Incumbent trivial{true, 1, {1}};
    return detail::finish(result, trivial, eps0);
  }

  std::uint64_t evaluated = 0;
  detail::Incumbent seeded = detail::uniform_scan(eps, target_eps_eff, bounds, evaluated);
  if (mode == SearchMode::heuristic) {
    result.evaluated = evaluated;
    return detail::finish(result, seeded, eps0);
  }

  detail::TreeSearch search(eps, target_eps_eff, bounds);
  if (seeded.found) search.seed(seeded.Q, seeded.b);
  search.run();
  result.evaluated = evaluated + search.evaluated();
  return detail::finish(result, search.incumbent(), eps0);
}

/// True iff some vector within `bounds` reaches eps_eff < eps0 - kThresholdMargin.
inline bool threshold_probe(LossRate eps0, const SearchBounds& bounds = {}) {
  bounds.validate();
  const double goal = eps0.value() - kThresholdMargin;
  if (!(goal > 0.0)) return false;
  const double target = std::nextafter(goal, 0.0);
  if (!(target > 0.0)) return false;
  return optimize_tree(eps0, target, bounds).feasible;
}

struct SweepRow {
  double eps0 = 0.0;
  double target = 0.0;
  std::optional<OptimizationResult> result;
  std::string error;  // set instead of result when the cell failed
};

/// One optimize_tree per (eps0, target) pair, eps0-major, in input order.
/// Invalid cells become error rows; the sweep itself does not abort.
inline std::vector<SweepRow> sweep(const std::vector<double>& eps0_list, const std::vector<double>& target_list,
                                   const SearchBounds& bounds = {}, SearchMode mode = SearchMode::exhaustive,
                                   unsigned threads = 1) {
  if (eps0_list.empty()) throw InvalidInput("eps0 list is empty");
  if (target_list.empty()) throw InvalidInput("target list is empty");
  bounds.validate();
  std::vector<SweepRow> rows(eps0_list.size() * target_list.size());
  for (std::size_t i = 0; i < eps0_list.size(); ++i) {
    for (std::size_t j = 0; j < target_list.size(); ++j) {
      auto& row = rows[i * target_list.size() + j];
      row.eps0 = eps0_list[i];
      row.target = target_list[j];
    }
  }
  for_each_block(rows.size(), threads, [&](std::size_t k) {
    auto& row = rows[k];
    try {
      row.result = optimize_tree(LossRate(row.eps0), row.target, bounds, mode);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace losstree

#endif  // LOSSTREE_OPTIMIZER_HPP

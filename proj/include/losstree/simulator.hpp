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

#ifndef LOSSTREE_SIMULATOR_HPP
#define LOSSTREE_SIMULATOR_HPP

// Operational model of the loss channel and the adaptive measurement
// strategy on an explicit tree. Nothing here uses the closed-form recursion;
// exact_success is the independent oracle the analytics are checked against.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "losstree/error.hpp"
#include "losstree/parallel.hpp"
#include "losstree/tree.hpp"

namespace losstree {

enum class FailureReason { no_present_first_level, child_removal_failed, sibling_removal_failed };

inline std::string_view to_string(FailureReason r) {
  switch (r) {
    case FailureReason::no_present_first_level: return "no_present_first_level";
    case FailureReason::child_removal_failed: return "child_removal_failed";
    case FailureReason::sibling_removal_failed: return "sibling_removal_failed";
  }
  return "unknown";
}

struct TrialOutcome {
  bool success = false;
  std::optional<std::size_t> a_vertex;
  std::optional<FailureReason> failure_reason;
};

namespace detail {

// `lost` is any callable std::size_t -> bool.
template <typename Lost>
bool indirect_removable(const TreeGraph& tree, const Lost& lost, std::size_t v);

template <typename Lost>
bool z_removable(const TreeGraph& tree, const Lost& lost, std::size_t v) {
  return !lost(v) || indirect_removable(tree, lost, v);
}

template <typename Lost>
bool children_z_removable(const TreeGraph& tree, const Lost& lost, std::size_t v) {
  for (std::size_t g = tree.child_begin(v); g < tree.child_end(v); ++g) {
    if (!z_removable(tree, lost, g)) return false;
  }
  return true;
}

template <typename Lost>
bool indirect_removable(const TreeGraph& tree, const Lost& lost, std::size_t v) {
  for (std::size_t c = tree.child_begin(v); c < tree.child_end(v); ++c) {
    if (!lost(c) && children_z_removable(tree, lost, c)) return true;
  }
  return false;
}

template <typename Lost>
TrialOutcome attempt(const TreeGraph& tree, const Lost& lost) {
  TrialOutcome out;
  const std::size_t first = tree.level_begin(1);
  const std::size_t last = tree.level_end(1);
  std::size_t q = first;
  while (q < last && lost(q)) ++q;
  if (q == last) {
    out.failure_reason = FailureReason::no_present_first_level;
    return out;
  }
  out.a_vertex = q;
  if (!children_z_removable(tree, lost, q)) {
    out.failure_reason = FailureReason::child_removal_failed;
    return out;
  }
  for (std::size_t u = first; u < q; ++u) {
    if (!indirect_removable(tree, lost, u)) {
      out.failure_reason = FailureReason::sibling_removal_failed;
      return out;
    }
  }
  for (std::size_t u = q + 1; u < last; ++u) {
    if (!z_removable(tree, lost, u)) {
      out.failure_reason = FailureReason::sibling_removal_failed;
      return out;
    }
  }
  out.success = true;
  return out;
}

struct MaskLost {
  std::uint64_t mask;
  bool operator()(std::size_t v) const noexcept { return (mask >> v) & 1U; }
};

// Lost flags of a subtree enumerated over a compact local numbering.
struct RemappedMaskLost {
  const std::vector<std::size_t>* local;  // global vertex -> local bit, or npos
  std::uint64_t mask;
  bool operator()(std::size_t v) const noexcept {
    const std::size_t bit = (*local)[v];
    return bit != TreeGraph::kNoParent && ((mask >> bit) & 1U);
  }
};

inline void check_pattern(const TreeGraph& tree, const LossPattern& pattern) {
  if (pattern.size() != tree.size()) throw InvalidInput("loss pattern length does not match the tree");
}

// sum_k counts[k] eps^k (1-eps)^(n-k), summed in k order.
inline double weigh_counts(const std::vector<std::uint64_t>& counts, double eps) {
  const std::size_t n = counts.size() - 1;
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (counts[k] == 0) continue;
    total += static_cast<double>(counts[k]) * std::pow(eps, static_cast<double>(k)) *
             std::pow(1.0 - eps, static_cast<double>(n - k));
  }
  return total;
}

}  // namespace detail

/// Largest vertex count exact enumeration accepts.
inline constexpr std::size_t kMaxEnumerationQubits = 24;

/// Can v be removed by an indirect Z measurement, i.e. is some child c of v
/// present with every child of c Z-removable (directly or, recursively,
/// indirectly)? Childless vertices cannot.
inline bool indirect_removal_feasible(const TreeGraph& tree, const LossPattern& pattern, std::size_t v) {
  detail::check_pattern(tree, pattern);
  if (v >= tree.size()) throw InvalidInput("vertex out of range");
  return detail::indirect_removable(tree, pattern, v);
}

/// One run of the strategy: the first present first-level qubit takes the A
/// measurement; then its children and all other first-level qubits must be
/// removed. There is no second A attempt.
inline TrialOutcome attempt_logical_measurement(const TreeGraph& tree, const LossPattern& pattern) {
  detail::check_pattern(tree, pattern);
  return detail::attempt(tree, pattern);
}

/// counts[k]: number of loss patterns with exactly k lost qubits for which
/// the strategy succeeds. Enumerates all 2^n patterns.
inline std::vector<std::uint64_t> success_counts(const TreeGraph& tree, unsigned threads = 1) {
  const std::size_t n = tree.size();
  if (n > kMaxEnumerationQubits) throw CapacityError("tree too large for exact enumeration");
  const std::uint64_t patterns = 1ULL << n;
  constexpr std::uint64_t kBlock = 1ULL << 14;
  const std::size_t blocks = static_cast<std::size_t>((patterns + kBlock - 1) / kBlock);
  std::vector<std::vector<std::uint64_t>> partial(blocks, std::vector<std::uint64_t>(n + 1, 0));
  for_each_block(blocks, threads, [&](std::size_t b) {
    const std::uint64_t lo = b * kBlock;
    const std::uint64_t hi = std::min(patterns, lo + kBlock);
    auto& counts = partial[b];
    for (std::uint64_t mask = lo; mask < hi; ++mask) {
      if (detail::attempt(tree, detail::MaskLost{mask}).success) ++counts[std::popcount(mask)];
    }
  });
  std::vector<std::uint64_t> counts(n + 1, 0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k <= n; ++k) counts[k] += p[k];
  return counts;
}

/// Exact success probability by enumeration of every loss pattern.
inline double exact_success(const TreeGraph& tree, LossRate eps0, unsigned threads = 1) {
  return detail::weigh_counts(success_counts(tree, threads), eps0.value());
}

/// counts[k] over the 2^d loss patterns of v's d descendants for which v is
/// indirectly removable. v's own loss flag is irrelevant.
inline std::vector<std::uint64_t> indirect_removal_counts(const TreeGraph& tree, std::size_t v) {
  if (v >= tree.size()) throw InvalidInput("vertex out of range");
  const auto desc = tree.descendants(v);
  if (desc.size() > kMaxEnumerationQubits) throw CapacityError("subtree too large for exact enumeration");
  std::vector<std::size_t> local(tree.size(), TreeGraph::kNoParent);
  for (std::size_t i = 0; i < desc.size(); ++i) local[desc[i]] = i;
  std::vector<std::uint64_t> counts(desc.size() + 1, 0);
  const std::uint64_t patterns = 1ULL << desc.size();
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    if (detail::indirect_removable(tree, detail::RemappedMaskLost{&local, mask}, v)) ++counts[std::popcount(mask)];
  }
  return counts;
}

/// Exact probability that v is indirectly removable.
inline double indirect_removal_probability(const TreeGraph& tree, std::size_t v, LossRate eps0) {
  return detail::weigh_counts(indirect_removal_counts(tree, v), eps0.value());
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
};

/// Trials are grouped in fixed blocks of this size. Block j draws from its
/// own std::mt19937_64 seeded with seed_seq{seed lo, seed hi, j lo, j hi}, so
/// output depends only on (tree, eps0, trials, seed), never on thread count.
inline constexpr std::uint64_t kTrialBlock = 1ULL << 14;

inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

/// Monte Carlo estimate of the strategy's success probability. Each vertex is
/// lost when a 53-bit uniform draw falls below eps0; vertices are sampled in
/// index order once per trial.
inline MonteCarloEstimate estimate_success(const TreeGraph& tree, LossRate eps0, std::uint64_t trials,
                                           std::uint64_t seed, unsigned threads = 1) {
  if (trials == 0) throw InvalidInput("trials must be at least 1");
  const double eps = eps0.value();
  const std::size_t blocks = static_cast<std::size_t>((trials + kTrialBlock - 1) / kTrialBlock);
  std::vector<std::uint64_t> hits(blocks, 0);
  for_each_block(blocks, threads, [&](std::size_t b) {
    auto rng = block_engine(seed, b);
    LossPattern pattern(tree.size());
    const std::uint64_t lo = b * kTrialBlock;
    const std::uint64_t hi = std::min(trials, lo + kTrialBlock);
    std::uint64_t local = 0;
    for (std::uint64_t t = lo; t < hi; ++t) {
      for (auto& flag : pattern.lost) flag = static_cast<double>(rng() >> 11) * 0x1.0p-53 < eps ? 1 : 0;
      if (detail::attempt(tree, pattern).success) ++local;
    }
    hits[b] = local;
  });
  MonteCarloEstimate out;
  out.trials = trials;
  for (auto h : hits) out.successes += h;
  const double n = static_cast<double>(trials);
  out.estimate = static_cast<double>(out.successes) / n;
  out.std_error = std::sqrt(out.estimate * (1.0 - out.estimate) / n);
  return out;
}

}  // namespace losstree

#endif  // LOSSTREE_SIMULATOR_HPP

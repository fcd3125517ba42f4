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

#ifndef LOSSTREE_RULE_SUITE_HPP
#define LOSSTREE_RULE_SUITE_HPP

// Randomized instance suites for the graph-state measurement rules.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "losstree/stabilizer.hpp"

namespace losstree {

struct RuleSuiteConfig {
  std::uint64_t seed = 1;
  std::size_t max_qubits = 12;  // largest graph (probe and gadget qubits included)
  std::size_t instances = 500;
  VerifyOptions options;
};

struct RuleSuiteResult {
  std::string rule;
  std::size_t instances = 0;
  std::size_t passed = 0;

  [[nodiscard]] bool ok() const { return instances > 0 && passed == instances; }
};

namespace detail {

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

inline Graph random_graph(std::mt19937_64& rng, std::size_t max_n) {
  const std::size_t n = uniform_index(rng, 1, max_n);
  Graph g(n);
  const std::uint64_t density = rng() % 101;  // percent
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (rng() % 100 < density) g.add_edge(a, b);
  return g;
}

// Random tree with at least one internal vertex and at most max_q qubits.
inline TreeGraph random_tree(std::mt19937_64& rng, std::size_t max_q, int min_branch_top = 1) {
  for (;;) {
    const std::size_t levels = uniform_index(rng, 2, 4);
    std::vector<int> b;
    for (std::size_t i = 0; i < levels; ++i) b.push_back(static_cast<int>(uniform_index(rng, 1, 3)));
    if (b[1] < min_branch_top) continue;
    BranchingVector shape(b);
    if (qubit_count(shape) <= max_q) return TreeGraph(shape);
  }
}

inline std::size_t random_internal_vertex(std::mt19937_64& rng, const TreeGraph& tree, std::size_t min_children = 1) {
  std::vector<std::size_t> internal;
  for (std::size_t v = 0; v < tree.size(); ++v)
    if (tree.child_count(v) >= min_children) internal.push_back(v);
  return internal[uniform_index(rng, 0, internal.size() - 1)];
}

inline std::mt19937_64 suite_engine(std::uint64_t seed, std::uint32_t suite) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), suite};
  return std::mt19937_64(seq);
}

}  // namespace detail

inline RuleSuiteResult run_z_removal_suite(const RuleSuiteConfig& cfg) {
  auto rng = detail::suite_engine(cfg.seed, 1);
  RuleSuiteResult r{"z_removal", cfg.instances, 0};
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    const Graph g = detail::random_graph(rng, cfg.max_qubits);
    const std::size_t v = detail::uniform_index(rng, 0, g.size() - 1);
    if (verify_z_removal(g, v, cfg.options)) ++r.passed;
  }
  return r;
}

/// Alternates linear-cluster fusions with the tree attachment gadget.
inline RuleSuiteResult run_x_fusion_suite(const RuleSuiteConfig& cfg) {
  if (cfg.max_qubits < 6) throw InvalidInput("x_fusion suite needs max_qubits >= 6");
  auto rng = detail::suite_engine(cfg.seed, 2);
  RuleSuiteResult r{"x_fusion", cfg.instances, 0};
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    bool ok = false;
    if (k % 2 == 0) {
      const std::size_t n = detail::uniform_index(rng, 4, cfg.max_qubits);
      const std::size_t i = detail::uniform_index(rng, 1, n - 3);
      ok = verify_x_fusion(n, i, cfg.options);
    } else {
      const TreeGraph tree = detail::random_tree(rng, cfg.max_qubits - 4);
      ok = verify_tree_attachment(tree, cfg.options);
    }
    if (ok) ++r.passed;
  }
  return r;
}

inline RuleSuiteResult run_counterfactual_suite(const RuleSuiteConfig& cfg) {
  if (cfg.max_qubits < 3) throw InvalidInput("counterfactual suite needs max_qubits >= 3");
  auto rng = detail::suite_engine(cfg.seed, 3);
  RuleSuiteResult r{"counterfactual_indirect_z", cfg.instances, 0};
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    const TreeGraph tree = detail::random_tree(rng, cfg.max_qubits - 1);
    const std::size_t v = detail::random_internal_vertex(rng, tree);
    if (counterfactual_indirect_z(tree, v, rng, cfg.options)) ++r.passed;
  }
  return r;
}

/// Alternates the two-path agreement check with recursive indirect Z under
/// random loss patterns.
inline RuleSuiteResult run_agreement_suite(const RuleSuiteConfig& cfg) {
  if (cfg.max_qubits < 4) throw InvalidInput("agreement suite needs max_qubits >= 4");
  auto rng = detail::suite_engine(cfg.seed, 4);
  RuleSuiteResult r{"counterfactual_agreement", cfg.instances, 0};
  for (std::size_t k = 0; k < cfg.instances; ++k) {
    bool ok = false;
    if (k % 2 == 0) {
      const TreeGraph tree = detail::random_tree(rng, cfg.max_qubits - 1, 2);
      const std::size_t v = detail::random_internal_vertex(rng, tree, 2);
      ok = counterfactual_paths_agree(tree, v, rng, cfg.options);
    } else {
      const TreeGraph tree = detail::random_tree(rng, cfg.max_qubits - 1);
      const std::size_t v = detail::random_internal_vertex(rng, tree);
      LossPattern pattern(tree.size());
      std::optional<bool> res;
      for (int attempt = 0; attempt < 32 && !res; ++attempt) {
        for (auto& f : pattern.lost) f = rng() % 3 == 0;
        res = counterfactual_with_losses(tree, v, pattern, rng, cfg.options);
      }
      if (!res) {
        LossPattern none(tree.size());
        res = counterfactual_with_losses(tree, v, none, rng, cfg.options);
      }
      ok = res.value_or(false);
    }
    if (ok) ++r.passed;
  }
  return r;
}

inline std::vector<RuleSuiteResult> run_rule_suites(const RuleSuiteConfig& cfg) {
  return {run_z_removal_suite(cfg), run_x_fusion_suite(cfg), run_counterfactual_suite(cfg), run_agreement_suite(cfg)};
}

}  // namespace losstree

#endif  // LOSSTREE_RULE_SUITE_HPP

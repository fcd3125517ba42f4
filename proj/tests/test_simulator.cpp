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

#include <cmath>
#include <random>

#include <catch_amalgamated.hpp>

#include "losstree/analytics.hpp"
#include "losstree/simulator.hpp"

using namespace losstree;
using Catch::Matchers::WithinAbs;

namespace {

LossPattern random_pattern(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution lose(p);
  LossPattern pat(n);
  for (auto& f : pat.lost) f = lose(rng) ? 1 : 0;
  return pat;
}

std::vector<BranchingVector> small_vectors(std::uint64_t max_q) {
  std::vector<BranchingVector> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, std::uint64_t q, std::uint64_t width) -> void {
    if (!cur.empty()) out.emplace_back(cur);
    for (int b = 1;; ++b) {
      const std::uint64_t grow = width * static_cast<std::uint64_t>(b);
      if (q + grow > max_q) break;
      cur.push_back(b);
      self(self, q + grow, grow);
      cur.pop_back();
    }
  };
  rec(rec, 0, 1);
  return out;
}

}  // namespace

TEST_CASE("build_tree shapes", "[simulator]") {
  const auto one = build_tree(BranchingVector{1});
  CHECK(one.size() == 1);
  CHECK(one.child_count(0) == 0);
  CHECK(one.parent(0) == TreeGraph::kNoParent);

  const auto t = build_tree(BranchingVector{2, 2, 2});
  CHECK(t.size() == 14);
  CHECK(t.levels() == 3);
  CHECK(t.level_end(1) - t.level_begin(1) == 2);
  CHECK(t.level_end(2) - t.level_begin(2) == 4);
  CHECK(t.level_end(3) - t.level_begin(3) == 8);
  for (std::size_t v = 0; v < t.size(); ++v) {
    CHECK(t.child_count(v) == (t.level(v) < 3 ? 2U : 0U));
    for (auto c = t.child_begin(v); c < t.child_end(v); ++c) CHECK(t.parent(c) == v);
  }
  CHECK(t.descendants(0).size() == 6);
  CHECK(build_tree(BranchingVector{4, 7, 3}).size() == 116);
  CHECK_THROWS_AS(TreeGraph(BranchingVector{100, 100, 100, 100}), CapacityError);
}

TEST_CASE("indirect_removal_feasible examples", "[simulator]") {
  const auto t = build_tree(BranchingVector{2, 2, 2});
  const LossPattern present(t.size());
  const LossPattern lost(t.size(), true);
  for (std::size_t v = 0; v < t.size(); ++v) {
    CHECK(indirect_removal_feasible(t, present, v) == (t.child_count(v) > 0));
    CHECK_FALSE(indirect_removal_feasible(t, lost, v));
  }
  // Vertex 0 has children 2, 3; child 2 lost, child 3 present with both children present.
  LossPattern p(t.size());
  p.lost[2] = 1;
  p.lost[t.child_begin(2)] = 1;
  CHECK(indirect_removal_feasible(t, p, 0));
  p.lost[t.child_begin(3)] = 1;  // now child 3 has a lost leaf, which cannot be removed indirectly
  CHECK_FALSE(indirect_removal_feasible(t, p, 0));
  CHECK_THROWS_AS(indirect_removal_feasible(t, p, t.size()), InvalidInput);
  CHECK_THROWS_AS(indirect_removal_feasible(t, LossPattern(3), 0), InvalidInput);
}

TEST_CASE("attempt_logical_measurement examples", "[simulator]") {
  const auto t = build_tree(BranchingVector{2, 2, 2});
  const auto ok = attempt_logical_measurement(t, LossPattern(t.size()));
  CHECK(ok.success);
  CHECK(ok.a_vertex == std::size_t{0});
  CHECK_FALSE(ok.failure_reason);

  LossPattern top_lost(t.size());
  top_lost.lost[0] = top_lost.lost[1] = 1;
  const auto none = attempt_logical_measurement(t, top_lost);
  CHECK_FALSE(none.success);
  CHECK(none.failure_reason == FailureReason::no_present_first_level);

  LossPattern first_lost(t.size());
  first_lost.lost[0] = 1;
  const auto second = attempt_logical_measurement(t, first_lost);
  CHECK(second.success);
  CHECK(second.a_vertex == std::size_t{1});

  // A lands on vertex 0; child 2 is lost along with both of its leaves.
  LossPattern stuck(t.size());
  const auto c0 = t.child_begin(0);
  stuck.lost[c0] = 1;
  for (auto g = t.child_begin(c0); g < t.child_end(c0); ++g) stuck.lost[g] = 1;
  const auto child_fail = attempt_logical_measurement(t, stuck);
  CHECK_FALSE(child_fail.success);
  CHECK(child_fail.a_vertex == std::size_t{0});
  CHECK(child_fail.failure_reason == FailureReason::child_removal_failed);

  // Vertex 0 lost and every level-2 child of it lost too: A moves to vertex 1, but 0 cannot be removed.
  LossPattern sib(t.size());
  sib.lost[0] = 1;
  for (auto c = t.child_begin(0); c < t.child_end(0); ++c) sib.lost[c] = 1;
  const auto sib_fail = attempt_logical_measurement(t, sib);
  CHECK_FALSE(sib_fail.success);
  CHECK(sib_fail.failure_reason == FailureReason::sibling_removal_failed);
  CHECK(to_string(FailureReason::sibling_removal_failed) == "sibling_removal_failed");
}

TEST_CASE("exact enumeration limits", "[simulator]") {
  const auto t = build_tree(BranchingVector{2, 2, 2});
  CHECK(exact_success(t, LossRate(0.0)) == 1.0);
  CHECK(exact_success(t, LossRate(1.0)) == 0.0);
  CHECK_THROWS_AS(exact_success(build_tree(BranchingVector{5, 5}), LossRate(0.1)), CapacityError);
  CHECK(success_counts(t, 1) == success_counts(t, 3));
}

TEST_CASE("enumeration agrees with the closed form for every tree with Q <= 12", "[simulator][oracle]") {
  const auto vectors = small_vectors(12);
  CHECK(vectors.size() > 100);
  for (const auto& b : vectors) {
    const TreeGraph tree(b);
    const auto counts = success_counts(tree);
    for (int i = 1; i <= 19; ++i) {
      const double e = 0.05 * i;
      INFO(b.to_string() << " eps0=" << e);
      CHECK_THAT(detail::weigh_counts(counts, e), WithinAbs(logical_success(b, LossRate(e)).P, 1e-12));
    }
  }
}

TEST_CASE("indirect removal marginal equals R_k", "[simulator][oracle]") {
  for (const auto& b : {BranchingVector{2, 2, 2}, BranchingVector{1, 3, 2, 2}, BranchingVector{2, 4, 3}, BranchingVector{1, 2, 1, 3, 2}}) {
    const TreeGraph tree(b);
    for (double e : {0.1, 0.25, 0.5, 0.75}) {
      const auto R = indirect_z_success(b, LossRate(e));
      for (int k = 1; k <= static_cast<int>(tree.levels()); ++k) {
        const auto v = tree.level_begin(k);
        CHECK_THAT(indirect_removal_probability(tree, v, LossRate(e)), WithinAbs(R[static_cast<std::size_t>(k - 1)], 1e-12));
      }
    }
  }
}

TEST_CASE("adding losses below level 1 never rescues a failing trial", "[simulator][property]") {
  std::mt19937_64 rng(21);
  for (const auto& b : {BranchingVector{2, 2, 2}, BranchingVector{4, 7, 3}, BranchingVector{3, 3, 3, 2}}) {
    const TreeGraph tree(b);
    for (int trial = 0; trial < 3000; ++trial) {
      const auto base = random_pattern(rng, tree.size(), 0.3);
      auto more = base;
      for (auto v = tree.level_end(1); v < tree.size(); ++v) more.lost[v] |= static_cast<std::uint8_t>(rng() % 5 == 0);
      if (!attempt_logical_measurement(tree, base).success) CHECK_FALSE(attempt_logical_measurement(tree, more).success);
      for (std::size_t v = 0; v < tree.size(); ++v) {
        if (!indirect_removal_feasible(tree, base, v)) CHECK_FALSE(indirect_removal_feasible(tree, more, v));
      }
    }
  }
}

TEST_CASE("losing the A vertex can move A to a qubit that succeeds", "[simulator]") {
  const auto t = build_tree(BranchingVector{2, 2, 2});
  // Vertex 0 present; child 2 lost with one lost leaf, so 2 is still removable, but child 3 lost with both leaves lost.
  LossPattern base(t.size());
  const auto c3 = t.child_begin(0) + 1;
  base.lost[c3] = 1;
  for (auto g = t.child_begin(c3); g < t.child_end(c3); ++g) base.lost[g] = 1;
  const auto before = attempt_logical_measurement(t, base);
  CHECK_FALSE(before.success);
  CHECK(before.a_vertex == std::size_t{0});

  auto more = base;
  more.lost[0] = 1;  // 0 is still indirectly removable through child 2
  const auto after = attempt_logical_measurement(t, more);
  CHECK(after.success);
  CHECK(after.a_vertex == std::size_t{1});
}

TEST_CASE("adding losses never rescues indirect removal", "[simulator][property]") {
  std::mt19937_64 rng(22);
  for (const auto& b : {BranchingVector{2, 2, 2}, BranchingVector{3, 3, 3, 2}}) {
    const TreeGraph tree(b);
    for (int trial = 0; trial < 3000; ++trial) {
      const auto base = random_pattern(rng, tree.size(), 0.3);
      auto more = base;
      for (auto& f : more.lost) f |= static_cast<std::uint8_t>(rng() % 5 == 0);
      for (std::size_t v = 0; v < tree.size(); ++v) {
        if (!indirect_removal_feasible(tree, base, v)) CHECK_FALSE(indirect_removal_feasible(tree, more, v));
      }
    }
  }
}

TEST_CASE("Monte Carlo estimates", "[simulator][montecarlo]") {
  const auto t = build_tree(BranchingVector{4, 7, 3});
  CHECK_THROWS_AS(estimate_success(t, LossRate(0.3), 0, 1), InvalidInput);

  const auto clean = estimate_success(t, LossRate(0.0), 1000, 5);
  CHECK(clean.estimate == 1.0);
  CHECK(clean.std_error == 0.0);
  CHECK(estimate_success(t, LossRate(1.0), 1000, 5).estimate == 0.0);

  const auto a = estimate_success(t, LossRate(0.3), 100000, 42, 1);
  const auto b = estimate_success(t, LossRate(0.3), 100000, 42, 4);
  const auto c = estimate_success(t, LossRate(0.3), 100000, 42, 1);
  CHECK(a.successes == b.successes);
  CHECK(a.successes == c.successes);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.trials == 100000);
  CHECK(estimate_success(t, LossRate(0.3), 100000, 43).successes != a.successes);

  const double P = logical_success(t.shape(), LossRate(0.3)).P;
  CHECK(std::abs(a.estimate - P) <= 4 * a.std_error);
}

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

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <catch_amalgamated.hpp>

#include "losstree/analytics.hpp"
#include "losstree/simulator.hpp"

using namespace losstree;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Direct 50-digit evaluation of the recursion, written independently of the
// complement form used by the library.
using Big = boost::multiprecision::cpp_bin_float_50;

Big big_eps_eff(const std::vector<int>& b, double eps_d) {
  const Big eps = eps_d;
  const std::size_t m = b.size() - 1;
  auto bk = [&](std::size_t k) { return k < b.size() ? b[k] : 0; };
  std::vector<Big> R(m + 3, Big(0));
  for (std::size_t k = m; k >= 1; --k) {
    R[k] = 1 - pow(1 - (1 - eps) * pow(1 - eps + eps * R[k + 2], bk(k + 1)), bk(k));
  }
  const Big P = (pow(1 - eps + eps * R[1], b[0]) - pow(eps * R[1], b[0])) * pow(1 - eps + eps * R[2], bk(1));
  return 1 - P;
}

BranchingVector random_vector(std::mt19937_64& rng, int max_levels, int max_branch) {
  std::vector<int> b(1 + rng() % max_levels);
  for (auto& v : b) v = 1 + static_cast<int>(rng() % max_branch);
  return BranchingVector(b);
}

}  // namespace

TEST_CASE("branching vectors validate and parse", "[analytics]") {
  CHECK(BranchingVector::parse("4,7,3") == BranchingVector{4, 7, 3});
  CHECK(BranchingVector::parse(" 2, 2 ").depth() == 1);
  CHECK_THROWS_AS(BranchingVector::parse(""), InvalidInput);
  CHECK_THROWS_AS(BranchingVector::parse("2,,2"), InvalidInput);
  CHECK_THROWS_AS(BranchingVector::parse("2,x"), InvalidInput);
  CHECK_THROWS_AS(BranchingVector::parse("2,0"), InvalidInput);
  CHECK_THROWS_AS(BranchingVector(std::vector<int>{}), InvalidInput);
  CHECK_THROWS_AS(LossRate(-0.1), InvalidInput);
  CHECK_THROWS_AS(LossRate(1.5), InvalidInput);
  CHECK_THROWS_AS(LossRate(std::nan("")), InvalidInput);
}

TEST_CASE("indirect_z_success examples", "[analytics]") {
  const BranchingVector b{2, 2, 2};
  for (double r : indirect_z_success(b, LossRate(1.0))) CHECK(r == 0.0);
  const auto lossless = indirect_z_success(b, LossRate(0.0));
  REQUIRE(lossless.size() == 3);
  CHECK(lossless[0] == 1.0);
  CHECK(lossless[1] == 1.0);
  CHECK(lossless[2] == 0.0);  // R_{m+1}

  const auto R = indirect_z_success(b, LossRate(0.2));
  CHECK_THAT(R[1], WithinAbs(0.96, 1e-15));
  CHECK_THAT(R[0], WithinAbs(0.761856, 1e-15));
  CHECK(R[2] == 0.0);
}

TEST_CASE("logical_success examples", "[analytics]") {
  CHECK(logical_success(BranchingVector{4, 7, 3}, LossRate(0.0)).P == 1.0);
  CHECK(logical_success(BranchingVector{5}, LossRate(0.0)).P == 1.0);
  CHECK_THAT(logical_success(BranchingVector{3}, LossRate(0.5)).P, WithinAbs(0.125, 1e-15));

  // 5308287232 / 6103515625, from exact rational enumeration of all 2^14 loss patterns.
  const auto rep = logical_success(BranchingVector{2, 2, 2}, LossRate(0.2));
  CHECK_THAT(rep.P, WithinAbs(5308287232.0 / 6103515625.0, 1e-12));
  CHECK(rep.eps_eff == 1.0 - rep.P);
  CHECK_THAT(rep.P, WithinAbs(exact_success(TreeGraph(BranchingVector{2, 2, 2}), LossRate(0.2)), 1e-12));
}

TEST_CASE("qubit_count examples", "[analytics]") {
  CHECK(qubit_count(BranchingVector{1}) == 1);
  CHECK(qubit_count(BranchingVector{2, 2, 2}) == 14);
  CHECK(qubit_count(BranchingVector{4, 7, 3}) == 116);
  CHECK(qubit_count(BranchingVector{15, 28, 36, 2}) == 15 + 15 * 28 + 15 * 28 * 36 + 15 * 28 * 36 * 2);
  CHECK_THROWS_AS(qubit_count(BranchingVector(std::vector<int>(70, 2))), CapacityError);
}

TEST_CASE("depth-0 trees reduce to (1-eps)^b0", "[analytics]") {
  for (int b0 : {1, 2, 5, 9}) {
    for (double e : {0.05, 0.3, 0.77}) {
      CHECK_THAT(logical_success(BranchingVector{b0}, LossRate(e)).P, WithinRel(std::pow(1 - e, b0), 1e-14));
    }
  }
}

TEST_CASE("probabilities stay in [0,1] and obey boundary identities", "[analytics][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto b = random_vector(rng, 6, 12);
    const double e = static_cast<double>(rng() % 1001) / 1000.0;
    const auto rep = logical_success(b, LossRate(e));
    CHECK(rep.P >= 0.0);
    CHECK(rep.P <= 1.0);
    REQUIRE(rep.R.size() == b.size());
    for (double r : rep.R) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    CHECK(rep.R.back() == 0.0);
    // Bottom level: R_m = 1 - eps^{b_m}.
    if (b.depth() >= 1) CHECK_THAT(rep.R[b.depth() - 1], WithinAbs(1.0 - std::pow(e, b[b.depth()]), 1e-15));
    if (rep.eps_eff >= kDirectEpsEffFloor) CHECK(rep.eps_eff == 1.0 - rep.P);

    const auto lossless = logical_success(b, LossRate(0.0));
    CHECK(lossless.P == 1.0);
    for (std::size_t k = 0; k + 1 < lossless.R.size(); ++k) CHECK(lossless.R[k] == 1.0);
    CHECK(logical_success(b, LossRate(1.0)).P == 0.0);
  }
}

TEST_CASE("first bracket equals the sum over where the A measurement lands", "[analytics][property]") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto b = random_vector(rng, 5, 10);
    const double e = static_cast<double>(1 + rng() % 999) / 1000.0;
    const double R1 = indirect_z_success(b, LossRate(e))[0];
    double sum = 0.0;
    for (int k = 1; k <= b[0]; ++k) {
      sum += std::pow(e * R1, k - 1) * (1 - e) * std::pow(1 - e + e * R1, b[0] - k);
    }
    const double bracket = std::pow(1 - e + e * R1, b[0]) - std::pow(e * R1, b[0]);
    CHECK_THAT(sum, WithinAbs(bracket, 1e-12));
  }
}

TEST_CASE("success is non-increasing in eps0", "[analytics][property]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    const auto b = random_vector(rng, 5, 8);
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
      const double P = logical_success(b, LossRate(i / 200.0)).P;
      CHECK(P <= prev + 1e-15);
      prev = P;
    }
  }
}

TEST_CASE("eps_eff tracks a 50-digit oracle in both regimes", "[analytics]") {
  struct Case {
    std::vector<int> b;
    double eps;
  };
  const std::vector<Case> cases{{{15, 28, 36, 2}, 0.2}, {{20, 40, 40, 4}, 0.2}, {{30, 50, 50, 8}, 0.1},
                                {{10, 14, 22, 2}, 0.2}, {{6, 10, 10}, 0.05},    {{25, 60, 60, 10, 2}, 0.3},
                                {{40, 60, 60, 8}, 0.1}, {{12, 20, 20}, 0.01},       {{30, 40, 40, 6}, 0.02}};
  int tiny = 0;
  for (const auto& c : cases) {
    const double got = logical_success(BranchingVector(c.b), LossRate(c.eps)).eps_eff;
    const double want = static_cast<double>(big_eps_eff(c.b, c.eps));
    INFO("eps_eff = " << want);
    CHECK(got > 0.0);
    if (want >= 2 * kDirectEpsEffFloor) {
      CHECK_THAT(got, WithinAbs(want, 4e-16));
    } else {
      ++tiny;
      CHECK_THAT(got, WithinRel(want, 1e-9));
    }
  }
  CHECK(tiny >= 2);
}

TEST_CASE("closed form matches enumeration on small trees", "[analytics]") {
  for (const auto& b : {BranchingVector{1}, BranchingVector{3}, BranchingVector{1, 1}, BranchingVector{2, 3},
                        BranchingVector{3, 1, 2}, BranchingVector{1, 2, 1, 2}}) {
    const TreeGraph tree(b);
    for (double e : {0.1, 0.35, 0.5, 0.8}) {
      CHECK_THAT(logical_success(b, LossRate(e)).P, WithinAbs(exact_success(tree, LossRate(e)), 1e-12));
    }
  }
}

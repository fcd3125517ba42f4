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

#ifndef LOSSTREE_ANALYTICS_HPP
#define LOSSTREE_ANALYTICS_HPP

// Closed-form success probabilities for tree-encoded logical measurements
// under independent qubit loss.
//
// Levels are numbered from 1: the b0 first-level qubits hang off the logical
// qubit, and every level-k qubit has b_k children. The recursion runs on
// complements (1 - R_k, 1 - C_k) so that effective loss rates far below
// machine epsilon keep full relative precision.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "losstree/error.hpp"

namespace losstree {

/// Per-level child counts (b0, b1, ..., bm) of a tree cluster.
class BranchingVector {
 public:
  BranchingVector() = default;

  explicit BranchingVector(std::vector<int> b) : b_(std::move(b)) { validate(); }
  BranchingVector(std::initializer_list<int> b) : b_(b) { validate(); }

  /// Parses a comma-separated list such as "4,7,3".
  static BranchingVector parse(std::string_view text) {
    std::vector<int> out;
    if (text.empty()) throw InvalidInput("branching vector is empty");
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t comma = std::min(text.find(',', pos), text.size());
      std::string_view field = text.substr(pos, comma - pos);
      while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
      while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
      int value = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw InvalidInput("malformed branching vector '" + std::string(text) + "'");
      }
      out.push_back(value);
      pos = comma + 1;
    }
    return BranchingVector(std::move(out));
  }

  [[nodiscard]] std::size_t depth() const noexcept { return b_.size() - 1; }
  [[nodiscard]] std::size_t size() const noexcept { return b_.size(); }
  [[nodiscard]] bool empty() const noexcept { return b_.empty(); }
  [[nodiscard]] int operator[](std::size_t i) const { return b_[i]; }
  /// b_i with the implicit boundary b_{m+1} = 0 (and zero beyond).
  [[nodiscard]] int at_or_zero(std::size_t i) const noexcept { return i < b_.size() ? b_[i] : 0; }
  [[nodiscard]] std::span<const int> values() const noexcept { return b_; }

  [[nodiscard]] std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < b_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(b_[i]);
    }
    return s;
  }

  friend bool operator==(const BranchingVector&, const BranchingVector&) = default;
  friend auto operator<=>(const BranchingVector&, const BranchingVector&) = default;

 private:
  void validate() const {
    if (b_.empty()) throw InvalidInput("branching vector is empty");
    for (int v : b_) {
      if (v < 1) throw InvalidInput("branching parameters must be >= 1");
    }
  }

  std::vector<int> b_;
};

/// Independent per-qubit loss probability eps0 in [0, 1].
class LossRate {
 public:
  constexpr LossRate() = default;
  explicit LossRate(double eps0) : eps_(eps0) {
    if (!(eps0 >= 0.0 && eps0 <= 1.0)) throw InvalidInput("loss rate must lie in [0, 1]");
  }
  [[nodiscard]] constexpr double value() const noexcept { return eps_; }

 private:
  double eps_ = 0.0;
};

struct SuccessReport {
  double P = 0.0;
  double eps_eff = 1.0;
  /// R_1 ... R_{m+1}; the last entry is always 0.
  std::vector<double> R;
};

namespace detail {

inline double clamp01(double p) noexcept {
  if (!(p > 0.0)) return 0.0;
  if (p > 1.0) return 1.0;
  return p;
}

}  // namespace detail

/// Removal statistics of one qubit, in complement form.
///   rbar = 1 - R: the indirect Z measurement on it fails.
///   cbar = 1 - C: at least one of its children cannot be Z-removed.
/// A childless qubit has rbar = 1, cbar = 0.
struct LevelState {
  double rbar = 1.0;
  double cbar = 0.0;

  [[nodiscard]] double R() const noexcept { return 1.0 - rbar; }
  [[nodiscard]] double C() const noexcept { return 1.0 - cbar; }
};

/// State of a qubit with `branch` children, each child having state `child`.
///   1 - R = [1 - (1 - eps) C_child]^branch
///   1 - C = 1 - (1 - eps (1 - R_child))^branch
inline LevelState parent_state(double eps, int branch, const LevelState& child) noexcept {
  LevelState s;
  s.rbar = detail::clamp01(std::pow(eps + (1.0 - eps) * child.cbar, branch));
  s.cbar = detail::clamp01(-std::expm1(branch * std::log1p(-eps * child.rbar)));
  return s;
}

/// Below this, 1 - P loses relative precision and eps_eff is taken from the
/// complement form instead.
inline constexpr double kDirectEpsEffFloor = 1e-15;

struct TopLevelResult {
  double P = 0.0;
  double eps_eff = 1.0;
};

/// Logical success for b0 first-level qubits whose subtrees all have state `first`.
/// P comes from the product form when small and from its complement when close to 1.
inline TopLevelResult top_level(double eps, int b0, const LevelState& first) noexcept {
  const double R1 = first.R();
  const double x = 1.0 - eps * first.rbar;  // Z-removal succeeds on a first-level qubit
  const double y = eps * R1;                // lost, but indirectly removable
  const double yb = std::pow(y, b0);
  // 1 - G C = gbar + cbar (1 - gbar), with gbar = (1 - x^b0) + y^b0.
  const double gbar = -std::expm1(b0 * std::log1p(-eps * first.rbar)) + yb;
  const double complement = detail::clamp01(gbar + first.cbar * (1.0 - gbar));
  TopLevelResult out;
  if (complement <= 0.5) {
    out.P = 1.0 - complement;
  } else {
    out.P = detail::clamp01((std::pow(x, b0) - yb) * first.C());
  }
  const double direct = 1.0 - out.P;
  out.eps_eff = direct >= kDirectEpsEffFloor ? direct : complement;
  return out;
}

/// States for levels 1 ... m+1, index k-1 holding level k.
inline std::vector<LevelState> level_states(const BranchingVector& b, LossRate eps0) {
  if (b.empty()) throw InvalidInput("branching vector is empty");
  const double eps = eps0.value();
  const std::size_t m = b.depth();
  std::vector<LevelState> states(m + 1);
  states[m] = LevelState{};
  for (std::size_t k = m; k >= 1; --k) states[k - 1] = parent_state(eps, b[k], states[k]);
  return states;
}

/// Indirect-Z success probabilities R_1 ... R_{m+1} (R_{m+1} = 0).
inline std::vector<double> indirect_z_success(const BranchingVector& b, LossRate eps0) {
  const auto states = level_states(b, eps0);
  std::vector<double> R;
  R.reserve(states.size());
  for (const auto& s : states) R.push_back(detail::clamp01(s.R()));
  return R;
}

inline SuccessReport logical_success(const BranchingVector& b, LossRate eps0) {
  const auto states = level_states(b, eps0);
  const auto top = top_level(eps0.value(), b[0], states.front());
  SuccessReport report;
  report.P = top.P;
  report.eps_eff = top.eps_eff;
  report.R.reserve(states.size());
  for (const auto& s : states) report.R.push_back(detail::clamp01(s.R()));
  return report;
}

/// Number of physical qubits in the tree: sum over levels of the level population.
/// Throws CapacityError if the count does not fit in 64 bits.
inline std::uint64_t qubit_count(const BranchingVector& b) {
  if (b.empty()) throw InvalidInput("branching vector is empty");
  std::uint64_t total = 0;
  std::uint64_t level = 1;
  for (int bi : b.values()) {
    if (level > UINT64_MAX / static_cast<std::uint64_t>(bi)) throw CapacityError("qubit count overflows");
    level *= static_cast<std::uint64_t>(bi);
    if (total > UINT64_MAX - level) throw CapacityError("qubit count overflows");
    total += level;
  }
  return total;
}

}  // namespace losstree

#endif  // LOSSTREE_ANALYTICS_HPP

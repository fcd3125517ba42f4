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

#ifndef LOSSTREE_STABILIZER_HPP
#define LOSSTREE_STABILIZER_HPP

// Binary-symplectic stabilizer tableau (generators only, with signs) and the
// graph-state measurement rules the loss-tolerance scheme relies on.
//
// Pauli convention: per qubit (x, z) = (1,0) X, (0,1) Z, (1,1) Y, with Y
// Hermitian. Products pick up the standard i^g phase.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "losstree/error.hpp"
#include "losstree/simulator.hpp"
#include "losstree/tree.hpp"

namespace losstree {

enum class Basis { X, Y, Z };

inline char basis_char(Basis b) { return b == Basis::X ? 'X' : b == Basis::Y ? 'Y' : 'Z'; }

struct PauliString {
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> z;
  bool negative = false;

  PauliString() = default;
  explicit PauliString(std::size_t n) : x(n, 0), z(n, 0) {}

  static PauliString single(std::size_t n, std::size_t q, Basis b, bool negative = false) {
    PauliString p(n);
    p.x[q] = b != Basis::Z;
    p.z[q] = b != Basis::X;
    p.negative = negative;
    return p;
  }

  [[nodiscard]] std::size_t size() const noexcept { return x.size(); }

  [[nodiscard]] bool commutes_with(const PauliString& o) const {
    unsigned acc = 0;
    for (std::size_t i = 0; i < x.size(); ++i) acc ^= (x[i] & o.z[i]) ^ (z[i] & o.x[i]);
    return acc == 0;
  }

  [[nodiscard]] bool same_operator(const PauliString& o) const { return x == o.x && z == o.z; }

  /// *this <- (*this) * o. Both must commute so the product stays Hermitian.
  PauliString& operator*=(const PauliString& o) {
    int phase = (negative ? 2 : 0) + (o.negative ? 2 : 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int x1 = x[i], z1 = z[i], x2 = o.x[i], z2 = o.z[i];
      if (x1 && z1) {
        phase += z2 - x2;
      } else if (x1) {
        phase += z2 * (2 * x2 - 1);
      } else if (z1) {
        phase += x2 * (1 - 2 * z2);
      }
      x[i] ^= o.x[i];
      z[i] ^= o.z[i];
    }
    phase = ((phase % 4) + 4) % 4;
    if (phase & 1) throw std::logic_error("product of anticommuting Paulis");
    negative = phase == 2;
    return *this;
  }

  [[nodiscard]] std::string to_string() const {
    std::string s = negative ? "-" : "+";
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] ? (z[i] ? 'Y' : 'X') : (z[i] ? 'Z' : '_');
    return s;
  }
};

/// Simple undirected graph on vertices 0 ... n-1, no self-loops.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), adj_(n * n, 0) {}

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] bool has_edge(std::size_t a, std::size_t b) const { return adj_[a * n_ + b] != 0; }

  void add_edge(std::size_t a, std::size_t b) {
    check_pair(a, b);
    adj_[a * n_ + b] = adj_[b * n_ + a] = 1;
  }
  void toggle_edge(std::size_t a, std::size_t b) {
    check_pair(a, b);
    adj_[a * n_ + b] ^= 1;
    adj_[b * n_ + a] ^= 1;
  }
  void isolate(std::size_t v) {
    for (std::size_t u = 0; u < n_; ++u) adj_[v * n_ + u] = adj_[u * n_ + v] = 0;
  }

  [[nodiscard]] std::vector<std::size_t> neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < n_; ++u)
      if (adj_[v * n_ + u]) out.push_back(u);
    return out;
  }

  static Graph path(std::size_t n) {
    Graph g(n);
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
    return g;
  }

 private:
  void check_pair(std::size_t a, std::size_t b) const {
    if (a >= n_ || b >= n_) throw InvalidInput("vertex out of range");
    if (a == b) throw InvalidInput("self-loops are not allowed");
  }

  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
};

struct MeasurementRecord {
  std::size_t qubit = 0;
  Basis basis = Basis::Z;
  int outcome = +1;
  bool deterministic = false;
};

/// n commuting, independent generators of an n-qubit stabilizer state.
class StabilizerTableau {
 public:
  StabilizerTableau() = default;
  explicit StabilizerTableau(std::vector<PauliString> generators) : gens_(std::move(generators)) {
    for (const auto& g : gens_)
      if (g.size() != gens_.size()) throw InvalidInput("tableau must have n generators on n qubits");
  }

  [[nodiscard]] std::size_t size() const noexcept { return gens_.size(); }
  [[nodiscard]] const std::vector<PauliString>& generators() const noexcept { return gens_; }
  [[nodiscard]] PauliString& generator(std::size_t i) { return gens_[i]; }

  /// If +P or -P is in the group, returns whether it is -P.
  [[nodiscard]] std::optional<bool> sign_in_group(const PauliString& p) const {
    const std::size_t n = size();
    Reduced red = reduce();
    std::vector<std::uint8_t> target(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = p.x[i];
      target[n + i] = p.z[i];
    }
    std::vector<std::uint8_t> combo(n, 0);
    for (std::size_t r = 0; r < red.pivots.size(); ++r) {
      if (!target[red.pivots[r]]) continue;
      for (std::size_t c = 0; c < 2 * n; ++c) target[c] ^= red.rows[r][c];
      for (std::size_t c = 0; c < n; ++c) combo[c] ^= red.combos[r][c];
    }
    for (auto bit : target)
      if (bit) return std::nullopt;
    PauliString prod(n);
    for (std::size_t i = 0; i < n; ++i)
      if (combo[i]) prod *= gens_[i];
    return prod.negative != p.negative;
  }

  [[nodiscard]] std::size_t rank() const { return reduce().pivots.size(); }

  /// Generators commute pairwise and are independent.
  [[nodiscard]] bool healthy() const {
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (!gens_[i].commutes_with(gens_[j])) return false;
    return rank() == size();
  }

  /// Same stabilizer group, signs included.
  [[nodiscard]] bool same_group(const StabilizerTableau& other) const {
    if (other.size() != size() || !healthy() || !other.healthy()) return false;
    for (const auto& g : other.gens_) {
      const auto s = sign_in_group(g);
      if (!s || *s) return false;
    }
    return true;
  }

  /// Conjugates the state by the Pauli `frame` (sign flips on anticommuting generators).
  void apply_frame(const PauliString& frame) {
    for (auto& g : gens_)
      if (!g.commutes_with(frame)) g.negative = !g.negative;
  }

  /// Projective single-qubit Pauli measurement. Random outcomes come from
  /// `forced` when given, otherwise from `rng`. Throws Contradiction when
  /// `forced` disagrees with a deterministic outcome.
  MeasurementRecord measure(std::size_t q, Basis basis, std::mt19937_64* rng,
                            std::optional<int> forced = std::nullopt) {
    if (q >= size()) throw InvalidInput("qubit out of range");
    if (forced && *forced != 1 && *forced != -1) throw InvalidInput("forced outcome must be +1 or -1");
    const PauliString p = PauliString::single(size(), q, basis);
    MeasurementRecord rec{q, basis, +1, false};

    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < size(); ++i) {
      if (gens_[i].commutes_with(p)) continue;
      if (!pivot) {
        pivot = i;
      } else {
        gens_[i] *= gens_[*pivot];
      }
    }
    if (!pivot) {
      rec.deterministic = true;
      rec.outcome = *sign_in_group(p) ? -1 : +1;
      if (forced && *forced != rec.outcome) throw Contradiction("forced outcome contradicts a deterministic result");
      return rec;
    }
    if (forced) {
      rec.outcome = *forced;
    } else {
      if (!rng) throw InvalidInput("random measurement needs an rng or a forced outcome");
      rec.outcome = ((*rng)() >> 63) ? -1 : +1;
    }
    gens_[*pivot] = PauliString::single(size(), q, basis, rec.outcome < 0);
    return rec;
  }

 private:
  struct Reduced {
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::vector<std::uint8_t>> combos;
    std::vector<std::size_t> pivots;
  };

  // Row-reduced copy of the generator matrix [x | z], with the generator
  // combination each row stands for.
  [[nodiscard]] Reduced reduce() const {
    const std::size_t n = size();
    std::vector<std::vector<std::uint8_t>> rows(n, std::vector<std::uint8_t>(2 * n));
    std::vector<std::vector<std::uint8_t>> combos(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < n; ++c) {
        rows[i][c] = gens_[i].x[c];
        rows[i][n + c] = gens_[i].z[c];
      }
      combos[i][i] = 1;
    }
    Reduced red;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < 2 * n && rank < n; ++col) {
      std::size_t r = rank;
      while (r < n && !rows[r][col]) ++r;
      if (r == n) continue;
      std::swap(rows[r], rows[rank]);
      std::swap(combos[r], combos[rank]);
      for (std::size_t other = 0; other < n; ++other) {
        if (other == rank || !rows[other][col]) continue;
        for (std::size_t c = 0; c < 2 * n; ++c) rows[other][c] ^= rows[rank][c];
        for (std::size_t c = 0; c < n; ++c) combos[other][c] ^= combos[rank][c];
      }
      red.pivots.push_back(col);
      ++rank;
    }
    rows.resize(rank);
    combos.resize(rank);
    red.rows = std::move(rows);
    red.combos = std::move(combos);
    return red;
  }

  std::vector<PauliString> gens_;
};

/// Generators X_i prod_{j in N(i)} Z_j, all with sign +1.
inline StabilizerTableau graph_state(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<PauliString> gens;
  gens.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    PauliString p(n);
    p.x[i] = 1;
    for (std::size_t j : g.neighbors(i)) p.z[j] = 1;
    gens.push_back(std::move(p));
  }
  return StabilizerTableau(std::move(gens));
}

inline std::pair<StabilizerTableau, MeasurementRecord> measure_pauli(StabilizerTableau t, std::size_t q, Basis basis,
                                                                     std::mt19937_64* rng,
                                                                     std::optional<int> forced = std::nullopt) {
  auto rec = t.measure(q, basis, rng, forced);
  return {std::move(t), rec};
}

/// Knobs for the verification routines. corrupt_signs flips every generator
/// sign of the prepared state, which every check below must detect.
struct VerifyOptions {
  bool corrupt_signs = false;
};

namespace detail {

inline StabilizerTableau prepare(const Graph& g, const VerifyOptions& opts) {
  auto t = graph_state(g);
  if (opts.corrupt_signs)
    for (std::size_t i = 0; i < t.size(); ++i) t.generator(i).negative = !t.generator(i).negative;
  return t;
}

inline PauliString z_frame(std::size_t n, const std::vector<std::size_t>& qubits) {
  PauliString f(n);
  for (auto q : qubits) f.z[q] ^= 1;
  return f;
}

}  // namespace detail

/// Z measurement on v leaves graph_state(g with v isolated) on the rest.
/// Byproduct frame: outcome -1 applies Z to every former neighbor of v.
inline bool verify_z_removal(const Graph& g, std::size_t v, const VerifyOptions& opts = {}) {
  if (v >= g.size()) throw InvalidInput("vertex out of range");
  const std::size_t n = g.size();
  const auto nbrs = g.neighbors(v);
  Graph reduced = g;
  reduced.isolate(v);
  for (int outcome : {+1, -1}) {
    auto t = detail::prepare(g, opts);
    try {
      t.measure(v, Basis::Z, nullptr, outcome);
    } catch (const Contradiction&) {
      return false;
    }
    if (outcome < 0) t.apply_frame(detail::z_frame(n, nbrs));
    auto expected = graph_state(reduced);
    expected.generator(v) = PauliString::single(n, v, Basis::Z, outcome < 0);
    if (!t.same_group(expected)) return false;
  }
  return true;
}

/// X measurements on adjacent i, j where i has exactly one other neighbor a,
/// a is not adjacent to j, and B = N(j) \ {i} is non-empty. Afterwards the
/// rest is the graph state of g with i, j removed and every edge a-b (b in B)
/// toggled, up to the frame Z_a^{s_j} prod_{b in B} Z_b^{s_i}, where s_q = 1
/// when qubit q gave -1. This follows from K_a K_j X_j and K_b K_i X_i.
inline bool verify_pair_contraction(const Graph& g, std::size_t i, std::size_t j, const VerifyOptions& opts = {}) {
  const std::size_t n = g.size();
  if (i >= n || j >= n || i == j || !g.has_edge(i, j)) throw InvalidInput("contraction needs two adjacent qubits");
  const auto ni = g.neighbors(i);
  if (ni.size() != 2) throw InvalidInput("first contracted qubit must have exactly two neighbors");
  const std::size_t a = ni[0] == j ? ni[1] : ni[0];
  if (g.has_edge(a, j)) throw InvalidInput("outer neighbor must not touch the second contracted qubit");
  std::vector<std::size_t> outer;
  for (auto b : g.neighbors(j))
    if (b != i) outer.push_back(b);
  if (outer.empty()) throw InvalidInput("second contracted qubit has no outer neighbor");

  Graph contracted = g;
  contracted.isolate(i);
  contracted.isolate(j);
  for (auto b : outer) contracted.toggle_edge(a, b);

  for (int si : {+1, -1}) {
    for (int sj : {+1, -1}) {
      auto t = detail::prepare(g, opts);
      try {
        t.measure(i, Basis::X, nullptr, si);
        t.measure(j, Basis::X, nullptr, sj);
      } catch (const Contradiction&) {
        return false;
      }
      PauliString frame(n);
      if (sj < 0) frame.z[a] ^= 1;
      if (si < 0)
        for (auto b : outer) frame.z[b] ^= 1;
      t.apply_frame(frame);
      auto expected = graph_state(contracted);
      expected.generator(i) = PauliString::single(n, i, Basis::X, si < 0);
      expected.generator(j) = PauliString::single(n, j, Basis::X, sj < 0);
      if (!t.same_group(expected)) return false;
    }
  }
  return true;
}

/// Two adjacent X measurements on interior qubits i, i+1 of an n-qubit linear
/// cluster bond i-1 directly to i+2.
inline bool verify_x_fusion(std::size_t path_length, std::size_t i, const VerifyOptions& opts = {}) {
  if (i < 1 || i + 2 >= path_length) throw InvalidInput("fusion needs interior adjacent qubits i, i+1");
  return verify_pair_contraction(Graph::path(path_length), i, i + 1, opts);
}

/// Tree attachment gadget: linear cluster x0 - x1, connector chain x1 - c1 - c2,
/// and c2 bonded to every first-level qubit of `tree`. Measuring X on c1 and c2
/// must leave x1 bonded directly to the first level.
/// Qubits: x0 = 0, x1 = 1, c1 = 2, c2 = 3, tree vertex v = 4 + v.
inline Graph attachment_gadget(const TreeGraph& tree) {
  Graph g(tree.size() + 4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (tree.parent(v) == TreeGraph::kNoParent) {
      g.add_edge(3, 4 + v);
    } else {
      g.add_edge(4 + tree.parent(v), 4 + v);
    }
  }
  return g;
}

inline bool verify_tree_attachment(const TreeGraph& tree, const VerifyOptions& opts = {}) {
  return verify_pair_contraction(attachment_gadget(tree), 2, 3, opts);
}

/// Graph state of a tree whose first level is bonded to an extra probe qubit.
/// Qubit 0 is the probe; tree vertex v is qubit v + 1.
inline Graph probed_tree_graph(const TreeGraph& tree) {
  Graph g(tree.size() + 1);
  for (std::size_t v = 0; v < tree.size(); ++v) {
    const std::size_t p = tree.parent(v);
    g.add_edge(p == TreeGraph::kNoParent ? 0 : p + 1, v + 1);
  }
  return g;
}

struct CounterfactualRun {
  int predicted = 0;  // value of Z_v inferred from the indirect pattern
  int observed = 0;   // value of a subsequent direct Z_v measurement
  bool deterministic = false;

  [[nodiscard]] bool ok() const { return deterministic && predicted == observed; }
};

namespace detail {

// Measures X on child c of tree vertex v and Z on all of c's children.
// Returns x_c * prod z, the value K_c forces on Z_v.
inline int indirect_pattern(StabilizerTableau& t, const TreeGraph& tree, std::size_t c, std::mt19937_64& rng) {
  int value = t.measure(c + 1, Basis::X, &rng).outcome;
  for (std::size_t g = tree.child_begin(c); g < tree.child_end(c); ++g) value *= t.measure(g + 1, Basis::Z, &rng).outcome;
  return value;
}

inline void check_internal(const TreeGraph& tree, std::size_t v) {
  if (v >= tree.size()) throw InvalidInput("vertex out of range");
  if (tree.child_count(v) == 0) throw InvalidInput("indirect Z needs a vertex with children");
}

}  // namespace detail

/// Indirect Z on tree vertex v through a randomly chosen child c: measure X_c
/// and Z on c's children, then measure Z_v directly and compare.
inline CounterfactualRun counterfactual_run(const TreeGraph& tree, std::size_t v, std::mt19937_64& rng,
                                            const VerifyOptions& opts = {}) {
  detail::check_internal(tree, v);
  auto t = detail::prepare(probed_tree_graph(tree), opts);
  const std::size_t c = tree.child_begin(v) + static_cast<std::size_t>(rng() % tree.child_count(v));
  CounterfactualRun run;
  run.predicted = detail::indirect_pattern(t, tree, c, rng);
  const auto rec = t.measure(v + 1, Basis::Z, &rng);
  run.observed = rec.outcome;
  run.deterministic = rec.deterministic;
  return run;
}

inline bool counterfactual_indirect_z(const TreeGraph& tree, std::size_t v, std::mt19937_64& rng,
                                      const VerifyOptions& opts = {}) {
  return counterfactual_run(tree, v, rng, opts).ok();
}

/// Two alternative indirect patterns on v (two distinct children) in one run.
/// Both must predict the same Z_v, and a direct Z_v must agree.
inline bool counterfactual_paths_agree(const TreeGraph& tree, std::size_t v, std::mt19937_64& rng,
                                       const VerifyOptions& opts = {}) {
  detail::check_internal(tree, v);
  if (tree.child_count(v) < 2) throw InvalidInput("two indirect paths need at least two children");
  auto t = detail::prepare(probed_tree_graph(tree), opts);
  const std::size_t k = tree.child_count(v);
  const std::size_t first = static_cast<std::size_t>(rng() % k);
  const std::size_t second = (first + 1 + static_cast<std::size_t>(rng() % (k - 1))) % k;
  const int red = detail::indirect_pattern(t, tree, tree.child_begin(v) + first, rng);
  const int green = detail::indirect_pattern(t, tree, tree.child_begin(v) + second, rng);
  const auto rec = t.measure(v + 1, Basis::Z, &rng);
  return red == green && rec.deterministic && rec.outcome == red;
}

namespace detail {

// Z value of tree vertex u: measured when present, else inferred recursively.
inline int infer_z(StabilizerTableau& t, const TreeGraph& tree, const LossPattern& lost, std::size_t u,
                   std::mt19937_64& rng);

inline int infer_indirect(StabilizerTableau& t, const TreeGraph& tree, const LossPattern& lost, std::size_t u,
                          std::mt19937_64& rng) {
  for (std::size_t c = tree.child_begin(u); c < tree.child_end(u); ++c) {
    if (lost(c) || !detail::children_z_removable(tree, lost, c)) continue;
    int value = t.measure(c + 1, Basis::X, &rng).outcome;
    for (std::size_t g = tree.child_begin(c); g < tree.child_end(c); ++g) value *= infer_z(t, tree, lost, g, rng);
    return value;
  }
  throw std::logic_error("indirect removal is infeasible");
}

inline int infer_z(StabilizerTableau& t, const TreeGraph& tree, const LossPattern& lost, std::size_t u,
                   std::mt19937_64& rng) {
  if (!lost(u)) return t.measure(u + 1, Basis::Z, &rng).outcome;
  return infer_indirect(t, tree, lost, u, rng);
}

}  // namespace detail

/// Indirect Z on v under a loss pattern, recursing through lost descendants
/// and never touching a lost qubit. Returns nullopt when the pattern admits no
/// indirect removal of v; otherwise whether a direct Z_v (measured regardless
/// of v's own flag) was forced to the inferred value.
inline std::optional<bool> counterfactual_with_losses(const TreeGraph& tree, std::size_t v, const LossPattern& pattern,
                                                      std::mt19937_64& rng, const VerifyOptions& opts = {}) {
  detail::check_internal(tree, v);
  if (!indirect_removal_feasible(tree, pattern, v)) return std::nullopt;
  auto t = detail::prepare(probed_tree_graph(tree), opts);
  const int predicted = detail::infer_indirect(t, tree, pattern, v, rng);
  const auto rec = t.measure(v + 1, Basis::Z, &rng);
  return rec.deterministic && rec.outcome == predicted;
}

}  // namespace losstree

#endif  // LOSSTREE_STABILIZER_HPP

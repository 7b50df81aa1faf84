#pragma once

// Powers of adjacency matrices and the connectivity relations between them.
//
// Entry (i, j) of A^k counts the directed walks of length exactly k from i to
// j. Loops in the graph make supports of different powers nest:
//   full diagonal (self-loops)     support(A^k) ⊆ support(A^(k+1))
//   symmetric support (undirected) support(A^k) ⊆ support(A^(k+2))
//   a directed m-cycle C           walks of length k touching C extend to k+m
// and acyclic graphs are nilpotent: A^(h+1) = 0 for the longest path h.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hopscope/graph.hpp"
#include "hopscope/support_pattern.hpp"

namespace hopscope {

// Exact walk counts; A^0 = I. Throws OverflowError if any intermediate power
// A^j (j <= k) has an entry beyond 64 bits.
SparseCountMatrix mat_power_count(const SparseCountMatrix& a, std::size_t k);

// Boolean-semiring power; never overflows.
SupportPattern mat_power_support(const SparseCountMatrix& a, std::size_t k);

// support(A^0), ..., support(A^k_max) computed incrementally.
std::vector<SupportPattern> support_powers(const SparseCountMatrix& a, std::size_t k_max);

enum class LoopLemma { self_loop, two_node, m_node };

std::string to_string(LoopLemma lemma);

struct LoopCheck {
  std::size_t k = 0;
  bool holds = true;
  double density = 0.0;   // density of support(A^k)
  std::size_t nnz = 0;    // non-zeros of support(A^k)
};

struct Counterexample {
  std::size_t k, i, j;
};

struct LoopLemmaReport {
  LoopLemma lemma = LoopLemma::self_loop;
  std::size_t shift = 0;          // 1, 2 or m
  std::vector<std::size_t> cycle;  // m_node only
  std::vector<LoopCheck> checks;   // k = 1..k_max
  std::optional<Counterexample> first_counterexample;

  bool all_hold() const { return !first_counterexample.has_value(); }
};

// For k = 1..k_max asserts the inclusion belonging to `lemma`. For m_node the
// asserted set is restricted to pairs (i, j) joined by some length-k walk that
// visits a node of `cycle`; pass an empty cycle to have one of length m found.
// Throws HypothesisError when the graph does not satisfy the lemma's premise
// (missing loop on a node, asymmetric support, no directed m-cycle).
LoopLemmaReport verify_loop_lemma(const SparseCountMatrix& a, LoopLemma lemma, std::size_t k_max,
                                  std::size_t m = 0, std::vector<std::size_t> cycle = {});

// Pairs (i, j) joined by at least one length-k walk that visits a node in
// `on_cycle` (endpoints included).
SupportPattern cycle_touching_walks(const SparseCountMatrix& a, const std::vector<bool>& on_cycle,
                                    std::size_t k);

// A simple directed cycle with exactly m distinct nodes, if any. Nodes are
// listed in walk order; the edge back to the first node closes it.
std::optional<std::vector<std::size_t>> find_directed_cycle(const SparseCountMatrix& a, std::size_t m);

bool is_directed_cycle(const SparseCountMatrix& a, const std::vector<std::size_t>& cycle);

struct DagProfile {
  bool is_dag = false;
  std::size_t longest_path_len = 0;     // edges on the longest path; valid when is_dag
  std::vector<std::size_t> topo_order;  // valid when is_dag
};

// Kahn's algorithm; longest path by DP over the topological order. A self-loop
// is a cycle.
DagProfile dag_profile(const SparseCountMatrix& a);

struct SupportPeriodicity {
  std::size_t preperiod = 0;
  std::size_t period = 0;
};

// Smallest (preperiod p >= 1, period t) with support(A^(k+t)) = support(A^k)
// for all k >= p, found by first repetition of the sequence support(A^1),
// support(A^2), ... . nullopt when no repetition occurs up to k_cap.
// Throws InputError for k_cap < 2 or nilpotent (acyclic) input.
std::optional<SupportPeriodicity> support_periodicity(const SparseCountMatrix& a, std::size_t k_cap);

// Exhaustive DFS over walks of length k from i to j; parallel edges count as
// distinct choices. Independent of the matrix product. Guards n <= 12, k <= 6.
Count path_count_oracle(const SparseCountMatrix& a, std::size_t k, std::size_t i, std::size_t j);

// Checks (A + I)^k = sum_{i=0..k} C(k, i) A^i as exact integer matrices.
bool binomial_expansion_check(const SparseCountMatrix& a, std::size_t k);

}  // namespace hopscope

#pragma once

// Seeded random graphs for property checks and synthetic experiments.

#include <cstddef>
#include <vector>

#include "hopscope/graph.hpp"
#include "hopscope/random.hpp"

namespace hopscope {

// Each ordered pair (i, j), i != j unless self_loops, is an edge with
// probability p; a present edge gets multiplicity uniform in 1..max_multiplicity.
SparseCountMatrix erdos_renyi(std::size_t n, double p, Rng& rng, bool self_loops = false,
                              Count max_multiplicity = 1);

// Edges only go forward in a random permutation of the nodes, so the result
// is acyclic by construction.
SparseCountMatrix random_dag(std::size_t n, double p, Rng& rng);

struct PlantedCycle {
  SparseCountMatrix graph;
  std::vector<std::size_t> cycle;
};

// Adds a directed cycle over m distinct random nodes (m <= n) to a.
PlantedCycle plant_cycle(const SparseCountMatrix& a, std::size_t m, Rng& rng);

}  // namespace hopscope

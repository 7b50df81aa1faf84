#include "hopscope/generators.hpp"

#include "hopscope/error.hpp"

namespace hopscope {

SparseCountMatrix erdos_renyi(std::size_t n, double p, Rng& rng, bool self_loops,
                              Count max_multiplicity) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !self_loops) continue;
      if (uniform01(rng) >= p) continue;
      const Count mult = max_multiplicity <= 1 ? 1 : 1 + uniform_index(rng, max_multiplicity);
      for (Count m = 0; m < mult; ++m) edges.emplace_back(i, j);
    }
  }
  return from_edge_list(edges, n);
}

SparseCountMatrix random_dag(std::size_t n, double p, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (uniform01(rng) < p) edges.emplace_back(order[a], order[b]);
    }
  }
  return from_edge_list(edges, n);
}

PlantedCycle plant_cycle(const SparseCountMatrix& a, std::size_t m, Rng& rng) {
  const std::size_t n = a.n_rows();
  if (m == 0 || m > n) throw InputError("plant_cycle: need 1 <= m <= n");
  std::vector<std::size_t> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  shuffle(nodes, rng);
  nodes.resize(m);
  std::vector<Edge> edges;
  for (std::size_t t = 0; t < m; ++t) edges.emplace_back(nodes[t], nodes[(t + 1) % m]);
  SparseCountMatrix loop = from_edge_list(edges, n);
  // Union rather than sum keeps existing multiplicities intact.
  SparseCountMatrix merged = add(a, loop);
  std::vector<Count> vals(merged.values().begin(), merged.values().end());
  for (std::size_t i = 0, p = 0; i < n; ++i) {
    for (std::size_t j : merged.row_cols(i)) {
      vals[p] = a.at(i, j) != 0 ? a.at(i, j) : 1;
      ++p;
    }
  }
  return {SparseCountMatrix(n, n, {merged.row_offsets().begin(), merged.row_offsets().end()},
                            {merged.col_indices().begin(), merged.col_indices().end()},
                            std::move(vals)),
          std::move(nodes)};
}

}  // namespace hopscope

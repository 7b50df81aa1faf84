#include <doctest.h>

#include <sstream>
#include <vector>

#include "hopscope/edge_list.hpp"
#include "hopscope/error.hpp"
#include "hopscope/generators.hpp"
#include "hopscope/graph.hpp"

using namespace hopscope;

namespace {

SparseCountMatrix graph(std::vector<Edge> edges, std::size_t n) { return from_edge_list(edges, n); }

}  // namespace

TEST_CASE("duplicate edges accumulate into multiplicity") {
  auto a = graph({{0, 1}, {0, 1}, {1, 2}}, 3);
  CHECK(a.at(0, 1) == 2);
  CHECK(a.at(1, 2) == 1);
  CHECK(a.at(2, 0) == 0);
  CHECK(a.nnz() == 2);
  CHECK(a.total_mass() == 3);
}

TEST_CASE("out-of-range endpoints are rejected") {
  CHECK_THROWS_AS(graph({{0, 3}}, 3), InputError);
}

TEST_CASE("CSR constructor validates its invariants") {
  CHECK_THROWS_AS(SparseCountMatrix(2, 2, {0, 1}, {0}, {1}), InputError);           // short offsets
  CHECK_THROWS_AS(SparseCountMatrix(2, 2, {0, 2, 2}, {1, 0}, {1, 1}), InputError);  // unsorted
  CHECK_THROWS_AS(SparseCountMatrix(2, 2, {0, 1, 1}, {0}, {0}), InputError);        // stored zero
  CHECK_THROWS_AS(SparseCountMatrix(2, 2, {0, 1, 1}, {2}, {1}), InputError);        // column range
  CHECK_NOTHROW(SparseCountMatrix(2, 2, {0, 1, 2}, {1, 0}, {3, 1}));
}

TEST_CASE("self-loop addition is additive") {
  auto a = graph({{0, 0}, {0, 1}}, 2);
  auto b = add_self_loops(a);
  CHECK(b.at(0, 0) == 2);
  CHECK(b.at(1, 1) == 1);
  CHECK(add_self_loops(b).at(0, 0) == 3);
  CHECK(has_full_diagonal(b));
  CHECK_FALSE(has_full_diagonal(a));
}

TEST_CASE("transpose, symmetrize and degrees") {
  auto a = graph({{0, 1}, {0, 2}, {2, 1}, {2, 1}}, 3);
  auto t = transpose(a);
  CHECK(t.at(1, 0) == 1);
  CHECK(t.at(1, 2) == 2);
  CHECK(transpose(t) == a);

  auto s = symmetrize(a);
  CHECK(s.at(1, 2) == 2);
  CHECK(s.at(2, 1) == 2);
  CHECK(has_symmetric_support(s));
  CHECK_FALSE(has_symmetric_support(a));

  auto out = degrees(a, DegreeKind::out);
  auto in = degrees(a, DegreeKind::in);
  CHECK(out.values == std::vector<Count>{2, 0, 2});
  CHECK(in.values == std::vector<Count>{0, 3, 1});

  GraphMeta m = meta(a);
  CHECK(m.n_nodes == 3);
  CHECK_FALSE(m.has_self_loops);
  CHECK_FALSE(m.is_symmetric);
  CHECK(meta(add_self_loops(s)).has_self_loops);
  CHECK(meta(s).is_symmetric);
}

TEST_CASE("deduplicate keeps the support with unit values") {
  auto a = graph({{0, 1}, {0, 1}, {1, 0}}, 2);
  auto d = deduplicate(a);
  CHECK(d.at(0, 1) == 1);
  CHECK(d.at(1, 0) == 1);
  CHECK(d.nnz() == a.nnz());
}

TEST_CASE("checked add and scale detect overflow") {
  auto a = scale(graph({{0, 1}}, 2), Count{1} << 63);
  CHECK_THROWS_AS(add(a, a), OverflowError);
  CHECK_THROWS_AS(scale(a, 2), OverflowError);
  CHECK(scale(a, 1) == a);
}

TEST_CASE("edge list round trip preserves multiplicity and isolated nodes") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = erdos_renyi(9, 0.3, rng, true, 3);
    std::stringstream buf;
    write_edge_list(buf, a);
    CHECK(read_edge_list(buf) == a);
  }
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# toy\n%nodes 4\n0\t1\n1 2\n\n0\t1\n");
  auto a = read_edge_list(in);
  CHECK(a.n_rows() == 4);
  CHECK(a.at(0, 1) == 2);

  std::istringstream no_header("2\t5\n");
  CHECK(read_edge_list(no_header).n_rows() == 6);

  std::istringstream bad("0\tx\n");
  CHECK_THROWS_AS(read_edge_list(bad), InputError);
  std::istringstream too_big("%nodes 2\n0\t2\n");
  CHECK_THROWS_AS(read_edge_list(too_big), InputError);
  std::istringstream three_fields("0\t1\t2\n");
  CHECK_THROWS_AS(read_edge_list(three_fields), InputError);
}

TEST_CASE("random DAGs are acyclic and planted cycles are cycles") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto d = random_dag(10, 0.4, rng);
    for (std::size_t i = 0; i < d.n_rows(); ++i) CHECK(d.at(i, i) == 0);
    auto planted = plant_cycle(erdos_renyi(10, 0.1, rng), 4, rng);
    REQUIRE(planted.cycle.size() == 4);
    for (std::size_t t = 0; t < 4; ++t) {
      CHECK(planted.graph.at(planted.cycle[t], planted.cycle[(t + 1) % 4]) > 0);
    }
  }
}

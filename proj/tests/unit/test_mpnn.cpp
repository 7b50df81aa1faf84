#include <doctest.h>

#include <vector>

#include "hopscope/error.hpp"
#include "hopscope/generators.hpp"
#include "hopscope/gradcheck.hpp"
#include "hopscope/hop_algebra.hpp"
#include "hopscope/kernels.hpp"
#include "hopscope/mpnn.hpp"

using namespace hopscope;

namespace {

SparseCountMatrix graph(std::vector<Edge> edges, std::size_t n) { return from_edge_list(edges, n); }

DenseMatrix random_dense(std::size_t r, std::size_t c, Rng& rng) {
  DenseMatrix m(r, c);
  for (double& v : m.data()) v = normal01(rng);
  return m;
}

DenseMatrix dense_product(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t t = 0; t < a.cols(); ++t) c(i, j) += a(i, t) * b(t, j);
  return c;
}

LayerParams random_layer(std::size_t in, std::size_t out, Rng& rng, bool sage = false) {
  LayerParams p{random_dense(in, out, rng), sage ? random_dense(in, out, rng) : DenseMatrix(), {}};
  for (std::size_t j = 0; j < out; ++j) p.bias.push_back(normal01(rng));
  return p;
}

constexpr Arch kArches[] = {Arch::k_layer_gcn, Arch::one_layer_power_k, Arch::hybrid_power_plus_linear,
                            Arch::graphsage, Arch::k_layer_gcn_selfloop};

}  // namespace

TEST_CASE("feature constructors") {
  CHECK(uniform_features(3) == DenseMatrix(3, 1, 1.0));
  auto p3 = graph({{0, 1}, {1, 2}}, 3);
  CHECK(degree_features(p3, DegreeFeature::in) == DenseMatrix(3, 1, {0, 1, 1}));
  CHECK(degree_features(p3, DegreeFeature::out) == DenseMatrix(3, 1, {1, 1, 0}));
  CHECK(degree_features(p3, DegreeFeature::both) == DenseMatrix(3, 2, {0, 1, 1, 1, 1, 0}));
}

TEST_CASE("names round trip") {
  for (Arch a : kArches) CHECK(parse_arch(to_string(a)) == a);
  for (Propagation p : {Propagation::forward, Propagation::reverse, Propagation::bidirectional})
    CHECK(parse_propagation(to_string(p)) == p);
  CHECK(parse_activation("identity") == Activation::identity);
  CHECK_FALSE(parse_arch("gat").has_value());
}

TEST_CASE("layer forward matches a dense oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto adj = normalize(erdos_renyi(5, 0.4, rng), NormScheme::sym);
    auto h = random_dense(5, 3, rng);
    auto p = random_layer(3, 4, rng, true);
    auto z = dense_product(dense_product(to_dense(adj), h), p.weight);
    auto self = dense_product(h, p.self_weight);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        self(i, j) += z(i, j) + p.bias[j];
        z(i, j) += p.bias[j];
      }
    LayerParams gcn{p.weight, {}, p.bias};
    CHECK(max_abs_diff(gcn_layer_forward(adj, h, gcn, Activation::identity), z) < 1e-12);
    CHECK(max_abs_diff(sage_layer_forward(adj, h, p, Activation::identity), self) < 1e-12);

    auto relu = gcn_layer_forward(adj, h, gcn, Activation::relu);
    for (std::size_t q = 0; q < relu.size(); ++q) CHECK(relu.data()[q] == std::max(0.0, z.data()[q]));
  }
}

TEST_CASE("degenerate layers") {
  Rng rng(32);
  auto h = random_dense(4, 3, rng);
  auto p = random_layer(3, 2, rng, true);
  WeightedAdjacency zero = as_weighted(SparseCountMatrix::zeros(4, 4));
  WeightedAdjacency id = as_weighted(SparseCountMatrix::identity(4));
  LayerParams gcn{p.weight, {}, std::vector<double>(2, 0.0)};
  CHECK(gcn_layer_forward(id, h, gcn, Activation::identity) == kernels::gemm(h, p.weight));

  LayerParams gcn_bias{p.weight, {}, p.bias};
  auto out = gcn_layer_forward(zero, h, gcn_bias, Activation::identity);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(out(i, j) == p.bias[j]);

  auto adj = normalize(erdos_renyi(4, 0.5, rng), NormScheme::row);
  // W0 = 0: a GCN layer with W1.
  LayerParams no_self{p.weight, DenseMatrix(3, 2), p.bias};
  CHECK(sage_layer_forward(adj, h, no_self, Activation::relu) == gcn_layer_forward(adj, h, gcn_bias, Activation::relu));
  // W1 = 0 or empty aggregation: an MLP layer.
  LayerParams no_neigh{DenseMatrix(3, 2), p.self_weight, p.bias};
  LayerParams mlp{p.self_weight, {}, p.bias};
  CHECK(sage_layer_forward(adj, h, no_neigh, Activation::relu) == gcn_layer_forward(id, h, mlp, Activation::relu));
  CHECK(sage_layer_forward(zero, h, p, Activation::relu) == gcn_layer_forward(id, h, mlp, Activation::relu));
}

TEST_CASE("non-finite values raise a numeric error") {
  auto adj = as_weighted(SparseCountMatrix::identity(2));
  LayerParams p{DenseMatrix(1, 1, 1e308), {}, {0.0}};
  CHECK_THROWS_AS(gcn_layer_forward(adj, DenseMatrix(2, 1, 1e308), p, Activation::identity), NumericError);
}

TEST_CASE("architectures coincide at k = 1") {
  Rng rng(33);
  auto a = erdos_renyi(12, 0.2, rng);
  auto x = random_dense(12, 4, rng);
  ModelSpec s{Arch::k_layer_gcn, 1, 8};
  auto params = init_params(s, 4, 3, 99);
  auto ref = model_forward(s, a, x, params);
  for (Arch arch : {Arch::one_layer_power_k, Arch::hybrid_power_plus_linear}) {
    ModelSpec t = s;
    t.arch = arch;
    CHECK(init_params(t, 4, 3, 99).size() == 1);
    CHECK(model_forward(t, a, x, params) == ref);
  }
}

TEST_CASE("parameter shapes per architecture") {
  for (Arch arch : kArches) {
    ModelSpec s{arch, 4, 8};
    auto p = init_params(s, 5, 3, 1);
    CHECK(p.size() == (arch == Arch::one_layer_power_k ? 1u : 4u));
    CHECK(p.front().weight.rows() == 5);
    CHECK(p.back().weight.cols() == 3);
    CHECK(p.front().self_weight.empty() == (arch != Arch::graphsage));
    for (const auto& l : p)
      for (double b : l.bias) CHECK(b == 0.0);
  }
  CHECK(init_params(ModelSpec{Arch::k_layer_gcn, 3, 8}, 5, 3, 7).front().weight ==
        init_params(ModelSpec{Arch::k_layer_gcn_selfloop, 3, 8}, 5, 3, 7).front().weight);
  CHECK_THROWS_AS(prepare_model(ModelSpec{Arch::k_layer_gcn, 0}, SparseCountMatrix::identity(2)), InputError);
}

TEST_CASE("propagation matrices") {
  auto a = graph({{0, 1}, {1, 2}}, 3);
  CHECK(propagation_matrix(a, Propagation::forward) == a);
  CHECK(propagation_matrix(a, Propagation::reverse) == transpose(a));
  CHECK(propagation_matrix(a, Propagation::bidirectional) == symmetrize(a));
}

TEST_CASE("weighted power falls back to reals on overflow") {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = 0; j < 30; ++j) edges.emplace_back(i, j);
  auto a = scale(graph(edges, 30), 1 << 20);
  CHECK_THROWS_AS(mat_power_count(a, 4), OverflowError);
  auto w = weighted_power(a, 4);
  const double expected = std::pow(30.0, 3) * std::pow(double(1 << 20), 4);
  CHECK(w.at(3, 7) == doctest::Approx(expected).epsilon(1e-12));
  auto small = graph({{0, 1}, {1, 0}, {1, 1}}, 2);
  CHECK(weighted_power(small, 3) == as_weighted(mat_power_count(small, 3)));
}

TEST_CASE("linear k-layer GCN collapses to A^k X W1...Wk") {
  Rng rng(34);
  for (std::size_t k = 1; k <= 4; ++k) {
    auto a = erdos_renyi(6, 0.35, rng, false, 2);
    auto x = random_dense(6, 3, rng);
    ModelSpec s{Arch::k_layer_gcn, k, 4, Activation::identity, NormScheme::none};
    auto params = init_params(s, 3, 2, k);
    auto layered = model_forward(s, a, x, params);
    CHECK(max_relative_diff(layered, collapse_linear(a, x, params, k)) < 1e-12);
  }
  // Identity features and weights give A^k itself.
  auto a = graph({{0, 1}, {1, 2}, {2, 0}, {0, 2}}, 3);
  ModelParams eye(3, LayerParams{DenseMatrix::identity(3), {}, {0.0, 0.0, 0.0}});
  CHECK(collapse_linear(a, DenseMatrix::identity(3), eye, 3) == to_dense(mat_power_count(a, 3)));

  ModelParams biased = eye;
  biased[0].bias[0] = 1.0;
  CHECK_THROWS_AS(collapse_linear(a, DenseMatrix::identity(3), biased, 3), InputError);
}

TEST_CASE("backward closed forms") {
  Rng rng(35);
  auto a = erdos_renyi(7, 0.3, rng);
  auto x = random_dense(7, 3, rng);
  ModelSpec s{Arch::k_layer_gcn, 1, 4, Activation::identity, NormScheme::sym};
  auto params = init_params(s, 3, 2, 5);
  auto up = random_dense(7, 2, rng);
  auto grads = model_backward(s, a, x, params, up);
  auto ah = kernels::spmm(normalize(a, NormScheme::sym), x);
  CHECK(max_abs_diff(grads.layers[0].weight, dense_product(transpose(ah), up)) < 1e-12);

  ModelSpec deep{Arch::graphsage, 3, 4};
  auto p3 = init_params(deep, 3, 2, 5);
  auto zero = model_backward(deep, a, x, p3, DenseMatrix(7, 2));
  for (const auto& l : zero.layers) {
    CHECK(max_abs(l.weight) == 0.0);
    CHECK(max_abs(l.self_weight) == 0.0);
  }
  for (double n : zero.layer_norms) CHECK(n == 0.0);
}

TEST_CASE("gradient check for every architecture") {
  for (Arch arch : kArches) {
    for (std::size_t k : {1, 3}) {
      ModelSpec s{arch, k, 6};
      auto inst = make_gradcheck_instance(s, 100 + k);
      CHECK(min_abs_hidden_preactivation(inst.model, forward(inst.model, inst.features, inst.params)) >= 1e-3);
      auto r = gradient_check(inst.model, inst.features, inst.params, inst.upstream);
      CHECK(r.max_relative_error < 1e-6);
      CHECK(r.per_layer.size() == inst.params.size());
    }
  }
}

TEST_CASE("gradient check catches a corrupted gradient") {
  ModelSpec s{Arch::k_layer_gcn, 2, 6};
  auto inst = make_gradcheck_instance(s, 7);
  auto r = gradient_check(inst.model, inst.features, inst.params, inst.upstream, 1e-4, 0.5);
  CHECK(r.max_relative_error > 1e-2);
}

TEST_CASE("row normalization with uniform features makes every row identical") {
  Rng rng(36);
  auto a = erdos_renyi(20, 0.2, rng);
  for (std::size_t i = 0; i < 20; ++i) a = add(a, from_edge_list(std::vector<Edge>{{i, (i + 1) % 20}}, 20));
  ModelSpec s{Arch::k_layer_gcn, 4, 8, Activation::relu, NormScheme::row};
  auto model = prepare_model(s, a);
  auto params = init_params(s, 1, 3, 3);
  for (auto& l : params)
    for (double& b : l.bias) b = normal01(rng);
  auto trace = forward(model, uniform_features(20), params);
  for (const auto& z : trace.pre_activations)
    for (std::size_t i = 1; i < z.rows(); ++i)
      for (std::size_t j = 0; j < z.cols(); ++j) CHECK(std::abs(z(i, j) - z(0, j)) <= 1e-12);
}

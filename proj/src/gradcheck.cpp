#include "hopscope/gradcheck.hpp"

#include <cmath>
#include <limits>

#include "hopscope/error.hpp"
#include "hopscope/generators.hpp"
#include "hopscope/random.hpp"

namespace hopscope {

namespace {

double objective(const PreparedModel& model, const DenseMatrix& x, const ModelParams& params,
                 const DenseMatrix& upstream) {
  const DenseMatrix logits = forward(model, x, params).logits;
  double s = 0.0;
  for (std::size_t p = 0; p < logits.size(); ++p) s += logits.data()[p] * upstream.data()[p];
  return s;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& n) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    diff += (a[p] - n[p]) * (a[p] - n[p]);
    na += a[p] * a[p];
    nn += n[p] * n[p];
  }
  diff = std::sqrt(diff);
  na = std::sqrt(na);
  nn = std::sqrt(nn);
  if (na < 1e-12 && nn < 1e-12) return 0.0;
  return diff / (na + nn);
}

}  // namespace

GradCheckResult gradient_check(const PreparedModel& model, const DenseMatrix& x,
                               const ModelParams& params, const DenseMatrix& upstream, double step,
                               double corrupt) {
  ParamGrads analytic = backward(model, params, forward(model, x, params), upstream);
  if (corrupt != 0.0 && !analytic.layers.empty() && !analytic.layers[0].weight.empty()) {
    double& g = analytic.layers[0].weight.data()[0];
    g += corrupt * (std::abs(g) + 1.0);
  }

  GradCheckResult result;
  result.per_layer.assign(params.size(), 0.0);
  ModelParams probe = params;

  auto check_tensor = [&](std::size_t layer, std::span<double> values, std::span<const double> grad) {
    std::vector<double> numeric(values.size());
    for (std::size_t p = 0; p < values.size(); ++p) {
      const double saved = values[p];
      values[p] = saved + step;
      const double up = objective(model, x, probe, upstream);
      values[p] = saved - step;
      const double down = objective(model, x, probe, upstream);
      values[p] = saved;
      numeric[p] = (up - down) / (2.0 * step);
    }
    const double err = relative_error({grad.begin(), grad.end()}, numeric);
    result.per_layer[layer] = std::max(result.per_layer[layer], err);
    result.max_relative_error = std::max(result.max_relative_error, err);
    result.n_parameters += values.size();
  };

  for (std::size_t l = 0; l < params.size(); ++l) {
    check_tensor(l, probe[l].weight.data(), analytic.layers[l].weight.data());
    if (!probe[l].self_weight.empty()) {
      check_tensor(l, probe[l].self_weight.data(), analytic.layers[l].self_weight.data());
    }
    check_tensor(l, probe[l].bias, analytic.layers[l].bias);
  }
  return result;
}

double min_abs_hidden_preactivation(const PreparedModel& model, const ForwardTrace& trace) {
  double m = std::numeric_limits<double>::infinity();
  if (model.spec.activation != Activation::relu) return m;
  for (std::size_t l = 0; l + 1 < trace.pre_activations.size(); ++l) {
    for (double z : trace.pre_activations[l].data()) m = std::min(m, std::abs(z));
  }
  return m;
}

GradCheckInstance make_gradcheck_instance(const ModelSpec& spec, std::uint64_t seed, std::size_t n,
                                          std::size_t in_dim, std::size_t out_dim, double kink_margin) {
  for (std::size_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(derive_seed(seed, attempt));
    SparseCountMatrix graph = erdos_renyi(n, 0.3, rng);
    DenseMatrix x(n, in_dim);
    for (double& v : x.data()) v = normal01(rng);
    ModelParams params = init_params(spec, in_dim, out_dim, rng());
    // Non-zero biases so the bias gradients are exercised away from zero.
    for (auto& layer : params) {
      for (double& b : layer.bias) b = 0.1 * normal01(rng);
    }
    PreparedModel model = prepare_model(spec, graph);
    ForwardTrace trace = forward(model, x, params);
    if (min_abs_hidden_preactivation(model, trace) < kink_margin) continue;
    DenseMatrix upstream(trace.logits.rows(), trace.logits.cols());
    for (double& v : upstream.data()) v = normal01(rng);
    return {std::move(graph), std::move(x), std::move(params), std::move(upstream), std::move(model),
            attempt};
  }
  throw InputError("could not sample a kink-free gradient-check instance");
}

}  // namespace hopscope

#include "hopscope/mpnn.hpp"

#include <cmath>

#include "hopscope/error.hpp"
#include "hopscope/hop_algebra.hpp"
#include "hopscope/kernels.hpp"
#include "hopscope/random.hpp"

namespace hopscope {

std::string to_string(Arch a) {
  switch (a) {
    case Arch::k_layer_gcn:
      return "k_layer_gcn";
    case Arch::one_layer_power_k:
      return "one_layer_power_k";
    case Arch::hybrid_power_plus_linear:
      return "hybrid_power_plus_linear";
    case Arch::graphsage:
      return "graphsage";
    case Arch::k_layer_gcn_selfloop:
      return "k_layer_gcn_selfloop";
  }
  return "unknown";
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

std::string to_string(Propagation p) {
  switch (p) {
    case Propagation::forward:
      return "forward";
    case Propagation::reverse:
      return "reverse";
    case Propagation::bidirectional:
      return "bidirectional";
  }
  return "unknown";
}

std::optional<Arch> parse_arch(std::string_view s) {
  for (Arch a : {Arch::k_layer_gcn, Arch::one_layer_power_k, Arch::hybrid_power_plus_linear,
                 Arch::graphsage, Arch::k_layer_gcn_selfloop}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<Activation> parse_activation(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity") return Activation::identity;
  return std::nullopt;
}

std::optional<Propagation> parse_propagation(std::string_view s) {
  for (Propagation p : {Propagation::forward, Propagation::reverse, Propagation::bidirectional}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

DenseMatrix uniform_features(std::size_t n, std::size_t d) { return DenseMatrix(n, d, 1.0); }

DenseMatrix degree_features(const SparseCountMatrix& a, DegreeFeature which) {
  const auto in = degrees(a, DegreeKind::in).values;
  const auto out = degrees(a, DegreeKind::out).values;
  DenseMatrix x(a.n_rows(), which == DegreeFeature::both ? 2 : 1);
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    switch (which) {
      case DegreeFeature::in:
        x(i, 0) = static_cast<double>(in[i]);
        break;
      case DegreeFeature::out:
        x(i, 0) = static_cast<double>(out[i]);
        break;
      case DegreeFeature::both:
        x(i, 0) = static_cast<double>(in[i]);
        x(i, 1) = static_cast<double>(out[i]);
        break;
    }
  }
  return x;
}

namespace {

void add_bias(DenseMatrix& z, const std::vector<double>& bias) {
  if (bias.size() != z.cols()) throw InputError("bias length does not match layer width");
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto r = z.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias[j];
  }
}

void add_into(DenseMatrix& acc, const DenseMatrix& x) {
  for (std::size_t p = 0; p < acc.size(); ++p) acc.data()[p] += x.data()[p];
}

DenseMatrix activate(const DenseMatrix& z, Activation act) {
  if (act == Activation::identity) return z;
  DenseMatrix out = z;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

void check_finite(const DenseMatrix& m, const char* where) {
  if (!all_finite(m)) throw NumericError(std::string("non-finite values in ") + where);
}

void check_weight(const DenseMatrix& w, std::size_t in, const char* what) {
  if (w.rows() != in) throw InputError(std::string(what) + ": weight rows do not match input width");
}

std::vector<double> column_sums(const DenseMatrix& m) {
  std::vector<double> s(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s[j] += r[j];
  }
  return s;
}

DenseMatrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix w(fan_in, fan_out);
  for (double& v : w.data()) v = uniform(rng, -limit, limit);
  return w;
}

// Layer l's pre-activation from its (already masked) input.
DenseMatrix layer_pre_activation(LayerKind kind, const WeightedAdjacency& adj, const DenseMatrix& h,
                                 const LayerParams& p, DenseMatrix* aggregated) {
  check_weight(p.weight, h.cols(), "layer");
  DenseMatrix z;
  switch (kind) {
    case LayerKind::gcn: {
      DenseMatrix ah = kernels::spmm(adj, h);
      z = kernels::gemm(ah, p.weight);
      if (aggregated) *aggregated = std::move(ah);
      break;
    }
    case LayerKind::sage: {
      check_weight(p.self_weight, h.cols(), "sage self");
      if (p.self_weight.cols() != p.weight.cols()) throw InputError("sage: W0 and W1 widths differ");
      DenseMatrix ah = kernels::spmm(adj, h);
      z = kernels::gemm(ah, p.weight);
      add_into(z, kernels::gemm(h, p.self_weight));
      if (aggregated) *aggregated = std::move(ah);
      break;
    }
    case LayerKind::dense:
      z = kernels::gemm(h, p.weight);
      break;
  }
  add_bias(z, p.bias);
  return z;
}

}  // namespace

DenseMatrix gcn_layer_forward(const WeightedAdjacency& adj, const DenseMatrix& h,
                              const LayerParams& p, Activation act) {
  if (adj.n_cols() != h.rows()) throw InputError("gcn_layer_forward: adjacency and features differ in size");
  DenseMatrix out = activate(layer_pre_activation(LayerKind::gcn, adj, h, p, nullptr), act);
  check_finite(out, "gcn layer output");
  return out;
}

DenseMatrix sage_layer_forward(const WeightedAdjacency& adj, const DenseMatrix& h,
                               const LayerParams& p, Activation act) {
  if (adj.n_cols() != h.rows()) throw InputError("sage_layer_forward: adjacency and features differ in size");
  DenseMatrix out = activate(layer_pre_activation(LayerKind::sage, adj, h, p, nullptr), act);
  check_finite(out, "sage layer output");
  return out;
}

SparseCountMatrix propagation_matrix(const SparseCountMatrix& a, Propagation prop) {
  switch (prop) {
    case Propagation::forward:
      return a;
    case Propagation::reverse:
      return transpose(a);
    case Propagation::bidirectional:
      return symmetrize(a);
  }
  return a;
}

WeightedAdjacency weighted_power(const SparseCountMatrix& b, std::size_t k) {
  try {
    return as_weighted(mat_power_count(b, k));
  } catch (const OverflowError&) {
    const WeightedAdjacency base = as_weighted(b);
    WeightedAdjacency p = base;
    for (std::size_t j = 2; j <= k; ++j) p = kernels::spgemm_real(p, base);
    return p;
  }
}

PreparedModel prepare_model(const ModelSpec& spec, const SparseCountMatrix& a) {
  if (spec.k < 1) throw InputError("model depth k must be at least 1");
  if (!a.is_square()) throw InputError("graph adjacency must be square");
  PreparedModel m{spec, {}, {}, {}};
  const SparseCountMatrix b = propagation_matrix(a, spec.propagation);
  switch (spec.arch) {
    case Arch::k_layer_gcn:
      m.aggregation = normalize(b, spec.norm);
      m.layers.assign(spec.k, LayerKind::gcn);
      break;
    case Arch::k_layer_gcn_selfloop:
      m.aggregation = normalize(add_self_loops(b), spec.norm);
      m.layers.assign(spec.k, LayerKind::gcn);
      break;
    case Arch::graphsage:
      m.aggregation = normalize(b, spec.norm);
      m.layers.assign(spec.k, LayerKind::sage);
      break;
    case Arch::one_layer_power_k:
      m.aggregation = normalize(weighted_power(b, spec.k), spec.norm);
      m.layers.assign(1, LayerKind::gcn);
      break;
    case Arch::hybrid_power_plus_linear:
      m.aggregation = normalize(weighted_power(b, spec.k), spec.norm);
      m.layers.assign(1, LayerKind::gcn);
      m.layers.resize(spec.k, LayerKind::dense);
      break;
  }
  m.aggregation_t = transpose(m.aggregation);
  return m;
}

ModelParams init_params(const ModelSpec& spec, std::size_t in_dim, std::size_t out_dim,
                        std::uint64_t seed) {
  const std::size_t n_layers =
      spec.arch == Arch::one_layer_power_k ? 1 : spec.k;
  Rng rng(seed);
  ModelParams params(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = l == 0 ? in_dim : spec.hidden_width;
    const std::size_t fan_out = l + 1 == n_layers ? out_dim : spec.hidden_width;
    params[l].weight = glorot(fan_in, fan_out, rng);
    if (spec.arch == Arch::graphsage) params[l].self_weight = glorot(fan_in, fan_out, rng);
    params[l].bias.assign(fan_out, 0.0);
  }
  return params;
}

ForwardTrace forward(const PreparedModel& model, const DenseMatrix& x, const ModelParams& params,
                     std::span<const DenseMatrix> masks) {
  const std::size_t n_layers = model.layers.size();
  if (params.size() != n_layers) throw InputError("parameter count does not match architecture");
  if (x.rows() != model.aggregation.n_rows()) throw InputError("feature rows do not match node count");
  if (!masks.empty() && masks.size() + 1 != n_layers) throw InputError("need one dropout mask per hidden layer");

  ForwardTrace trace;
  trace.inputs.reserve(n_layers);
  trace.aggregated.resize(n_layers);
  trace.pre_activations.reserve(n_layers);
  DenseMatrix h = x;
  for (std::size_t l = 0; l < n_layers; ++l) {
    DenseMatrix z = layer_pre_activation(model.layers[l], model.aggregation, h, params[l],
                                         &trace.aggregated[l]);
    check_finite(z, "layer pre-activation");
    trace.inputs.push_back(std::move(h));
    const bool last = l + 1 == n_layers;
    h = activate(z, last ? Activation::identity : model.spec.activation);
    trace.pre_activations.push_back(std::move(z));
    if (!last && !masks.empty()) {
      const DenseMatrix& mask = masks[l];
      if (mask.rows() != h.rows() || mask.cols() != h.cols()) throw InputError("dropout mask shape mismatch");
      for (std::size_t p = 0; p < h.size(); ++p) h.data()[p] *= mask.data()[p];
    }
  }
  trace.logits = std::move(h);
  return trace;
}

ParamGrads backward(const PreparedModel& model, const ModelParams& params, const ForwardTrace& trace,
                    const DenseMatrix& upstream, std::span<const DenseMatrix> masks) {
  const std::size_t n_layers = model.layers.size();
  if (params.size() != n_layers || trace.pre_activations.size() != n_layers) {
    throw InputError("backward: trace/parameters do not match architecture");
  }
  if (upstream.rows() != trace.logits.rows() || upstream.cols() != trace.logits.cols()) {
    throw InputError("backward: upstream gradient shape differs from logits");
  }
  ParamGrads grads;
  grads.layers.resize(n_layers);
  grads.layer_norms.assign(n_layers, 0.0);

  DenseMatrix d_out = upstream;
  for (std::size_t l = n_layers; l-- > 0;) {
    const bool last = l + 1 == n_layers;
    DenseMatrix dz = std::move(d_out);
    if (!last && model.spec.activation == Activation::relu) {
      const DenseMatrix& z = trace.pre_activations[l];
      for (std::size_t p = 0; p < dz.size(); ++p) {
        if (!(z.data()[p] > 0.0)) dz.data()[p] = 0.0;
      }
    }
    const DenseMatrix& h = trace.inputs[l];
    const LayerParams& p = params[l];
    LayerParams& g = grads.layers[l];
    g.bias = column_sums(dz);

    DenseMatrix dh;
    switch (model.layers[l]) {
      case LayerKind::gcn:
        g.weight = kernels::gemm_tn(trace.aggregated[l], dz);
        if (l > 0) dh = kernels::spmm(model.aggregation_t, kernels::gemm_nt(dz, p.weight));
        break;
      case LayerKind::sage:
        g.weight = kernels::gemm_tn(trace.aggregated[l], dz);
        g.self_weight = kernels::gemm_tn(h, dz);
        if (l > 0) {
          dh = kernels::spmm(model.aggregation_t, kernels::gemm_nt(dz, p.weight));
          add_into(dh, kernels::gemm_nt(dz, p.self_weight));
        }
        break;
      case LayerKind::dense:
        g.weight = kernels::gemm_tn(h, dz);
        if (l > 0) dh = kernels::gemm_nt(dz, p.weight);
        break;
    }

    double sq = 0.0;
    for (double v : g.weight.data()) sq += v * v;
    for (double v : g.self_weight.data()) sq += v * v;
    for (double v : g.bias) sq += v * v;
    grads.layer_norms[l] = std::sqrt(sq);

    if (l > 0) {
      if (!masks.empty()) {
        const DenseMatrix& mask = masks[l - 1];
        for (std::size_t q = 0; q < dh.size(); ++q) dh.data()[q] *= mask.data()[q];
      }
      d_out = std::move(dh);
    }
  }
  return grads;
}

DenseMatrix model_forward(const ModelSpec& spec, const SparseCountMatrix& a, const DenseMatrix& x,
                          const ModelParams& params) {
  return forward(prepare_model(spec, a), x, params).logits;
}

ParamGrads model_backward(const ModelSpec& spec, const SparseCountMatrix& a, const DenseMatrix& x,
                          const ModelParams& params, const DenseMatrix& upstream) {
  PreparedModel model = prepare_model(spec, a);
  ForwardTrace trace = forward(model, x, params);
  return backward(model, params, trace, upstream);
}

DenseMatrix collapse_linear(const SparseCountMatrix& a, const DenseMatrix& x,
                            const ModelParams& params, std::size_t k) {
  if (params.size() != k || k == 0) throw InputError("collapse_linear: need exactly k >= 1 layers");
  for (const LayerParams& p : params) {
    if (!p.self_weight.empty()) throw InputError("collapse_linear: sage layers are not collapsible");
    for (double b : p.bias) {
      if (b != 0.0) throw InputError("collapse_linear: biases must be zero");
    }
  }
  DenseMatrix product = params.front().weight;
  for (std::size_t l = 1; l < k; ++l) product = kernels::gemm(product, params[l].weight);
  DenseMatrix aggregated = kernels::spmm(as_weighted(mat_power_count(a, k)), x);
  return kernels::gemm(aggregated, product);
}

}  // namespace hopscope

#pragma once

// Dense forward/backward passes for the message-passing architectures.
//
//   gcn layer    H' = act(Â H W + b)
//   sage layer   H' = act(Â H W1 + H W0 + b)
//   dense layer  H' = act(H W + b)
//
// The last layer of every model emits raw logits (no activation). Â is built
// once per model from the graph (see prepare_model) and shared by all of its
// graph layers.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hopscope/dense.hpp"
#include "hopscope/graph.hpp"
#include "hopscope/normalization.hpp"
#include "hopscope/weighted.hpp"

namespace hopscope {

enum class Arch {
  k_layer_gcn,               // k gcn layers over Â = f(B)
  one_layer_power_k,         // 1 gcn layer over Â = f(B^k)
  hybrid_power_plus_linear,  // 1 gcn layer over f(B^k), then k-1 dense layers
  graphsage,                 // k sage layers over f(B)
  k_layer_gcn_selfloop,      // k gcn layers over f(B + I)
};

enum class Activation { relu, identity };

// Which structural matrix B the model aggregates over.
enum class Propagation { forward, reverse, bidirectional };  // A, A^T, A + A^T

std::string to_string(Arch a);
std::string to_string(Activation a);
std::string to_string(Propagation p);
std::optional<Arch> parse_arch(std::string_view s);
std::optional<Activation> parse_activation(std::string_view s);
std::optional<Propagation> parse_propagation(std::string_view s);

struct ModelSpec {
  Arch arch = Arch::k_layer_gcn;
  std::size_t k = 1;
  std::size_t hidden_width = 16;
  Activation activation = Activation::relu;  // hidden layers only
  NormScheme norm = NormScheme::sym;
  Propagation propagation = Propagation::forward;
};

struct LayerParams {
  DenseMatrix weight;       // W, or W1 for sage
  DenseMatrix self_weight;  // W0 for sage; empty otherwise
  std::vector<double> bias;
};

using ModelParams = std::vector<LayerParams>;

enum class LayerKind { gcn, sage, dense };

// All-ones n x d.
DenseMatrix uniform_features(std::size_t n, std::size_t d = 1);

enum class DegreeFeature { in, out, both };  // both = [in, out]
DenseMatrix degree_features(const SparseCountMatrix& a, DegreeFeature which);

DenseMatrix gcn_layer_forward(const WeightedAdjacency& adj, const DenseMatrix& h,
                              const LayerParams& p, Activation act);
DenseMatrix sage_layer_forward(const WeightedAdjacency& adj, const DenseMatrix& h,
                               const LayerParams& p, Activation act);

SparseCountMatrix propagation_matrix(const SparseCountMatrix& a, Propagation prop);

// Real-valued B^k: exact integer counts when they fit in 64 bits, otherwise a
// floating-point product.
WeightedAdjacency weighted_power(const SparseCountMatrix& b, std::size_t k);

// The graph-dependent part of a model, computed once.
struct PreparedModel {
  ModelSpec spec;
  std::vector<LayerKind> layers;
  WeightedAdjacency aggregation;
  WeightedAdjacency aggregation_t;
};

// Throws InputError for k < 1 or a non-square graph.
PreparedModel prepare_model(const ModelSpec& spec, const SparseCountMatrix& a);

// Layer widths in -> hidden -> ... -> hidden -> out. Weights uniform in
// +-sqrt(6 / (fan_in + fan_out)); biases zero. Draw order depends only on the
// layer shapes, so architectures with equal shapes get equal parameters.
ModelParams init_params(const ModelSpec& spec, std::size_t in_dim, std::size_t out_dim,
                        std::uint64_t seed);

struct ForwardTrace {
  std::vector<DenseMatrix> inputs;           // H_l as seen by layer l (after dropout)
  std::vector<DenseMatrix> aggregated;       // Â H_l; empty for dense layers
  std::vector<DenseMatrix> pre_activations;  // Z_l
  DenseMatrix logits;
};

// masks[l] multiplies the output of hidden layer l (input of layer l + 1);
// pass none for a deterministic evaluation pass.
ForwardTrace forward(const PreparedModel& model, const DenseMatrix& x, const ModelParams& params,
                     std::span<const DenseMatrix> masks = {});

struct ParamGrads {
  std::vector<LayerParams> layers;
  std::vector<double> layer_norms;  // Frobenius norm of each layer's gradients
};

// Exact reverse-mode gradients of sum(upstream ⊙ logits).
ParamGrads backward(const PreparedModel& model, const ModelParams& params, const ForwardTrace& trace,
                    const DenseMatrix& upstream, std::span<const DenseMatrix> masks = {});

DenseMatrix model_forward(const ModelSpec& spec, const SparseCountMatrix& a, const DenseMatrix& x,
                          const ModelParams& params);
ParamGrads model_backward(const ModelSpec& spec, const SparseCountMatrix& a, const DenseMatrix& x,
                          const ModelParams& params, const DenseMatrix& upstream);

// A^k X (W_1 ... W_k) computed directly from the integer power. Requires k
// plain weight matrices and all-zero biases (identity activation and no
// normalization are implied).
DenseMatrix collapse_linear(const SparseCountMatrix& a, const DenseMatrix& x,
                            const ModelParams& params, std::size_t k);

}  // namespace hopscope

#pragma once

// Central finite-difference check of mpnn::backward. The numerical side only
// ever calls forward().

#include <cstdint>
#include <vector>

#include "hopscope/mpnn.hpp"

namespace hopscope {

struct GradCheckResult {
  // Per parameter tensor: |g_analytic - g_numeric| / (|g_analytic| + |g_numeric|)
  // in the Euclidean norm; tensors whose gradients are both below 1e-12 count as 0.
  double max_relative_error = 0.0;
  std::vector<double> per_layer;  // max over the tensors of each layer
  std::size_t n_parameters = 0;
};

// `corrupt` perturbs the analytic gradient of the first weight entry before
// comparison (negative control for the checker itself).
GradCheckResult gradient_check(const PreparedModel& model, const DenseMatrix& x,
                               const ModelParams& params, const DenseMatrix& upstream,
                               double step = 1e-4, double corrupt = 0.0);

// Smallest |z| over hidden ReLU pre-activations; +inf when there are none.
double min_abs_hidden_preactivation(const PreparedModel& model, const ForwardTrace& trace);

struct GradCheckInstance {
  SparseCountMatrix graph;
  DenseMatrix features;
  ModelParams params;
  DenseMatrix upstream;
  PreparedModel model;
  std::size_t resamples = 0;
};

// Random small instance (n nodes, in_dim features, out_dim classes) whose
// hidden pre-activations all satisfy |z| >= kink_margin; resamples otherwise.
GradCheckInstance make_gradcheck_instance(const ModelSpec& spec, std::uint64_t seed,
                                          std::size_t n = 10, std::size_t in_dim = 3,
                                          std::size_t out_dim = 3, double kink_margin = 1e-3);

}  // namespace hopscope

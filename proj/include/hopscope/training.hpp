#pragma once

// Full-batch node classification: splits, Adam training with early stopping,
// multi-split evaluation, architecture/depth sweeps and synthetic datasets.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hopscope/data_io.hpp"
#include "hopscope/dense.hpp"
#include "hopscope/graph.hpp"
#include "hopscope/mpnn.hpp"

namespace hopscope {

struct SplitSpec {
  std::vector<std::size_t> train, val, test;
  std::uint64_t seed = 0;
};

// Per class: per_class_train training nodes, per_class_val validation nodes,
// the rest test. Split s uses derive_seed(seed, s). Throws InputError when a
// class has fewer than per_class_train + per_class_val + 1 members.
std::vector<SplitSpec> make_splits(const std::vector<std::size_t>& labels, std::size_t n_splits,
                                   std::uint64_t seed, std::size_t per_class_train = 20,
                                   std::size_t per_class_val = 30);

struct TrainConfig {
  double lr = 0.01;
  double l2 = 5e-4;
  double dropout = 0.5;
  std::size_t max_epochs = 300;
  std::size_t early_stop_patience = 100;
  std::size_t lr_sched_patience = 20;  // halve lr after this many epochs without improvement
  std::uint64_t seed = 0;

  // Longer budget used for the published experiments.
  static TrainConfig paper_protocol();
  // Throws InputError for out-of-range values.
  void validate() const;
};

struct RunMetrics {
  double test_acc = 0.0;
  double val_acc = 0.0;
  double majority_acc = 0.0;  // share of the most frequent class among test nodes
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  std::vector<std::vector<double>> grad_norms;  // [epoch][layer]
  std::vector<double> train_loss;
};

struct Metrics {
  std::vector<RunMetrics> runs;         // successful runs in split order
  std::vector<std::string> failures;    // one message per failed split
  double test_mean = 0.0;
  double test_std = 0.0;  // population
  double majority_mean = 0.0;
};

// Softmax cross-entropy over the training nodes. Throws NumericError (with
// the epoch) when the loss or a forward pass stops being finite.
RunMetrics train_model(const ModelSpec& spec, const SparseCountMatrix& graph, const DenseMatrix& x,
                       const std::vector<std::size_t>& labels, const SplitSpec& split,
                       const TrainConfig& cfg);

// One run per split; splits run in parallel, results in split order.
Metrics train_splits(const ModelSpec& spec, const DatasetBundle& data,
                     const std::vector<SplitSpec>& splits, const TrainConfig& cfg);

struct SweepOptions {
  std::size_t n_splits = 10;
  std::size_t per_class_train = 20;
  std::size_t per_class_val = 30;
};

// Support density of the matrix whose k-th power the architecture reaches:
// B^k, or (B + I)^k for self-loop and sage variants.
double effective_density(const ModelSpec& spec, const SparseCountMatrix& graph);

// Every template at every k; rows ordered template-major then by k.
SweepTable run_sweep(const std::vector<ModelSpec>& templates, const std::vector<std::size_t>& ks,
                     const DatasetBundle& data, const TrainConfig& cfg, const SweepOptions& opt = {});

enum class SynthKind { structure_only, hybrid, sparse_digraph_deep };

std::string to_string(SynthKind k);
std::optional<SynthKind> parse_synth_kind(std::string_view s);

struct SynthOptions {
  double noise = 0.0;           // probability of replacing a label by another class
  double feature_signal = 1.0;  // hybrid and sparse_digraph_deep
  double homophily = 0.85;      // hybrid
};

// structure_only: 4 classes given by the quartile band of each node's number
//   of length-2 out-walks, all-ones features.
// hybrid: 4-class planted partition digraph with Gaussian class-mean features.
// sparse_digraph_deep: 3 classes, each a sparse strongly connected digraph
//   (cycle plus chords), Gaussian class-mean features.
DatasetBundle synthesize_dataset(SynthKind kind, std::size_t n, std::uint64_t seed,
                                 const SynthOptions& opt = {});

// Band of the 2-walk count used to label structure_only: <=2, <=6, <=14, more.
std::size_t two_walk_band(Count walks);

}  // namespace hopscope

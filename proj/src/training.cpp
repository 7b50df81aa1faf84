#include "hopscope/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "hopscope/error.hpp"
#include "hopscope/hop_algebra.hpp"
#include "hopscope/random.hpp"

namespace hopscope {

namespace {

std::size_t class_count(const std::vector<std::size_t>& labels) {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

struct LossResult {
  double loss = 0.0;
  DenseMatrix grad;  // d loss / d logits
};

// Mean softmax cross-entropy over `nodes`.
LossResult cross_entropy(const DenseMatrix& logits, const std::vector<std::size_t>& labels,
                         const std::vector<std::size_t>& nodes) {
  LossResult r{0.0, DenseMatrix(logits.rows(), logits.cols())};
  const double inv = 1.0 / static_cast<double>(nodes.size());
  for (std::size_t v : nodes) {
    auto z = logits.row(v);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double zi : z) sum += std::exp(zi - zmax);
    const double log_sum = zmax + std::log(sum);
    r.loss += (log_sum - z[labels[v]]) * inv;
    auto g = r.grad.row(v);
    for (std::size_t c = 0; c < z.size(); ++c) g[c] = std::exp(z[c] - log_sum) * inv;
    g[labels[v]] -= inv;
  }
  return r;
}

double accuracy(const DenseMatrix& logits, const std::vector<std::size_t>& labels,
                const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t v : nodes) {
    auto z = logits.row(v);
    auto best = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    if (best == labels[v]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(nodes.size());
}

double majority_share(const std::vector<std::size_t>& labels, const std::vector<std::size_t>& nodes) {
  if (nodes.empty()) return 0.0;
  std::vector<std::size_t> counts(class_count(labels), 0);
  for (std::size_t v : nodes) ++counts[labels[v]];
  return static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
         static_cast<double>(nodes.size());
}

struct Adam {
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::size_t t = 0;
  std::vector<std::vector<double>> m, v;

  explicit Adam(const ModelParams& params) {
    for (const LayerParams& p : params) {
      for (std::size_t size : {p.weight.size(), p.self_weight.size(), p.bias.size()}) {
        m.emplace_back(size, 0.0);
        v.emplace_back(size, 0.0);
      }
    }
  }

  void step(ModelParams& params, const ParamGrads& grads, double lr) {
    ++t;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    std::size_t slot = 0;
    auto update = [&](std::span<double> w, std::span<const double> g) {
      auto& ms = m[slot];
      auto& vs = v[slot];
      for (std::size_t i = 0; i < w.size(); ++i) {
        ms[i] = beta1 * ms[i] + (1.0 - beta1) * g[i];
        vs[i] = beta2 * vs[i] + (1.0 - beta2) * g[i] * g[i];
        w[i] -= lr * (ms[i] / c1) / (std::sqrt(vs[i] / c2) + eps);
      }
      ++slot;
    };
    for (std::size_t l = 0; l < params.size(); ++l) {
      update(params[l].weight.data(), grads.layers[l].weight.data());
      update(params[l].self_weight.data(), grads.layers[l].self_weight.data());
      update(params[l].bias, grads.layers[l].bias);
    }
  }
};

void add_weight_decay(ParamGrads& grads, const ModelParams& params, double l2) {
  if (l2 == 0.0) return;
  for (std::size_t l = 0; l < params.size(); ++l) {
    auto add = [l2](std::span<double> g, std::span<const double> w) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += l2 * w[i];
    };
    add(grads.layers[l].weight.data(), params[l].weight.data());
    add(grads.layers[l].self_weight.data(), params[l].self_weight.data());
  }
}

std::vector<DenseMatrix> dropout_masks(const PreparedModel& model, std::size_t n, double rate, Rng& rng) {
  std::vector<DenseMatrix> masks;
  if (rate <= 0.0 || model.layers.size() < 2) return masks;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
    DenseMatrix mask(n, model.spec.hidden_width);
    for (double& x : mask.data()) x = uniform01(rng) < rate ? 0.0 : keep_scale;
    masks.push_back(std::move(mask));
  }
  return masks;
}

RunMetrics train_prepared(const PreparedModel& model, const DenseMatrix& x,
                          const std::vector<std::size_t>& labels, const SplitSpec& split,
                          const TrainConfig& cfg) {
  cfg.validate();
  if (labels.size() != x.rows()) throw InputError("label count does not match node count");
  if (split.train.empty()) throw InputError("training split is empty");
  const std::size_t n = x.rows();

  ModelParams params =
      init_params(model.spec, x.cols(), class_count(labels), derive_seed(cfg.seed, split.seed, 1));
  Rng dropout_rng(derive_seed(cfg.seed, split.seed, 2));
  Adam adam(params);

  RunMetrics run;
  ModelParams best = params;
  double best_val_acc = -1.0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  double lr = cfg.lr;
  std::size_t stale = 0;

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    try {
      auto masks = dropout_masks(model, n, cfg.dropout, dropout_rng);
      ForwardTrace trace = forward(model, x, params, masks);
      LossResult loss = cross_entropy(trace.logits, labels, split.train);
      if (!std::isfinite(loss.loss)) throw NumericError("training loss is not finite");
      ParamGrads grads = backward(model, params, trace, loss.grad, masks);
      run.grad_norms.push_back(grads.layer_norms);
      run.train_loss.push_back(loss.loss);
      add_weight_decay(grads, params, cfg.l2);
      adam.step(params, grads, lr);

      DenseMatrix logits = forward(model, x, params).logits;
      const double val_acc = accuracy(logits, labels, split.val);
      const double val_loss =
          split.val.empty() ? 0.0 : cross_entropy(logits, labels, split.val).loss;
      if (!std::isfinite(val_loss)) throw NumericError("validation loss is not finite");
      run.epochs_run = epoch + 1;
      if (val_acc > best_val_acc || (val_acc == best_val_acc && val_loss < best_val_loss)) {
        best_val_acc = val_acc;
        best_val_loss = val_loss;
        best = params;
        run.best_epoch = epoch;
        stale = 0;
        continue;
      }
      ++stale;
      if (stale >= cfg.early_stop_patience) break;
      if (stale % cfg.lr_sched_patience == 0) lr *= 0.5;
    } catch (const NumericError& e) {
      throw NumericError(e.what(), static_cast<long>(epoch));
    }
  }

  DenseMatrix logits = forward(model, x, best).logits;
  run.test_acc = accuracy(logits, labels, split.test);
  run.val_acc = accuracy(logits, labels, split.val);
  run.majority_acc = majority_share(labels, split.test);
  return run;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double mu = mean(v);
  double sq = 0.0;
  for (double x : v) sq += (x - mu) * (x - mu);
  return std::sqrt(sq / static_cast<double>(v.size()));
}

std::string failure_message(std::size_t split, const std::exception& e) {
  std::string msg = "split " + std::to_string(split) + ": " + e.what();
  if (const auto* ne = dynamic_cast<const NumericError*>(&e); ne && ne->epoch() >= 0) {
    msg += " (epoch " + std::to_string(ne->epoch()) + ")";
  }
  return msg;
}

// Runs every split of one prepared model. `results` and `errors` are indexed
// by split; exactly one of the two is filled per split.
void run_splits(const PreparedModel& model, const DatasetBundle& data, const std::vector<SplitSpec>& splits,
                const TrainConfig& cfg, std::vector<RunMetrics>& results, std::vector<std::string>& errors) {
  results.assign(splits.size(), {});
  errors.assign(splits.size(), {});
  const auto n_splits = static_cast<long>(splits.size());
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < n_splits; ++s) {
    try {
      results[s] = train_prepared(model, data.features, data.labels, splits[s], cfg);
    } catch (const std::exception& e) {
      errors[s] = failure_message(static_cast<std::size_t>(s), e);
    }
  }
}

Metrics collect(std::vector<RunMetrics>& results, std::vector<std::string>& errors) {
  Metrics m;
  std::vector<double> acc, majority;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (!errors[s].empty()) {
      m.failures.push_back(std::move(errors[s]));
      continue;
    }
    acc.push_back(results[s].test_acc);
    majority.push_back(results[s].majority_acc);
    m.runs.push_back(std::move(results[s]));
  }
  m.test_mean = mean(acc);
  m.test_std = population_std(acc);
  m.majority_mean = mean(majority);
  return m;
}

bool uses_self_loops(Arch a) { return a == Arch::k_layer_gcn_selfloop || a == Arch::graphsage; }

}  // namespace

TrainConfig TrainConfig::paper_protocol() {
  TrainConfig cfg;
  cfg.max_epochs = 1500;
  cfg.early_stop_patience = 410;
  cfg.lr_sched_patience = 80;
  return cfg;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InputError("lr must be positive");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw InputError("l2 must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("dropout must be in [0, 1)");
  if (max_epochs == 0) throw InputError("max_epochs must be at least 1");
  if (early_stop_patience == 0) throw InputError("early_stop_patience must be at least 1");
  if (early_stop_patience >= max_epochs) throw InputError("early_stop_patience must be below max_epochs");
  if (lr_sched_patience == 0) throw InputError("lr_sched_patience must be at least 1");
}

std::vector<SplitSpec> make_splits(const std::vector<std::size_t>& labels, std::size_t n_splits,
                                   std::uint64_t seed, std::size_t per_class_train,
                                   std::size_t per_class_val) {
  const std::size_t n_classes = class_count(labels);
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t v = 0; v < labels.size(); ++v) members[labels[v]].push_back(v);
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (members[c].size() < per_class_train + per_class_val + 1) {
      throw InputError("class " + std::to_string(c) + " has " + std::to_string(members[c].size()) +
                       " nodes; a split needs at least " +
                       std::to_string(per_class_train + per_class_val + 1));
    }
  }
  std::vector<SplitSpec> splits;
  splits.reserve(n_splits);
  for (std::size_t s = 0; s < n_splits; ++s) {
    SplitSpec split;
    split.seed = derive_seed(seed, s);
    Rng rng(split.seed);
    for (std::size_t c = 0; c < n_classes; ++c) {
      std::vector<std::size_t> nodes = members[c];
      shuffle(nodes, rng);
      auto train_end = nodes.begin() + static_cast<long>(per_class_train);
      auto val_end = train_end + static_cast<long>(per_class_val);
      split.train.insert(split.train.end(), nodes.begin(), train_end);
      split.val.insert(split.val.end(), train_end, val_end);
      split.test.insert(split.test.end(), val_end, nodes.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    splits.push_back(std::move(split));
  }
  return splits;
}

RunMetrics train_model(const ModelSpec& spec, const SparseCountMatrix& graph, const DenseMatrix& x,
                       const std::vector<std::size_t>& labels, const SplitSpec& split,
                       const TrainConfig& cfg) {
  return train_prepared(prepare_model(spec, graph), x, labels, split, cfg);
}

Metrics train_splits(const ModelSpec& spec, const DatasetBundle& data, const std::vector<SplitSpec>& splits,
                     const TrainConfig& cfg) {
  cfg.validate();
  PreparedModel model = prepare_model(spec, data.graph);
  std::vector<RunMetrics> results;
  std::vector<std::string> errors;
  run_splits(model, data, splits, cfg, results, errors);
  return collect(results, errors);
}

double effective_density(const ModelSpec& spec, const SparseCountMatrix& graph) {
  SparseCountMatrix b = propagation_matrix(graph, spec.propagation);
  if (uses_self_loops(spec.arch)) b = add_self_loops(b);
  return density(mat_power_support(b, spec.k));
}

SweepTable run_sweep(const std::vector<ModelSpec>& templates, const std::vector<std::size_t>& ks,
                     const DatasetBundle& data, const TrainConfig& cfg, const SweepOptions& opt) {
  cfg.validate();
  const auto splits =
      make_splits(data.labels, opt.n_splits, cfg.seed, opt.per_class_train, opt.per_class_val);
  const std::size_t k_max = ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());

  // Support powers shared by all templates with the same (propagation, self-loop) pair.
  std::map<std::pair<Propagation, bool>, std::vector<SupportPattern>> powers;
  auto density_of = [&](const ModelSpec& spec) {
    auto key = std::make_pair(spec.propagation, uses_self_loops(spec.arch));
    auto it = powers.find(key);
    if (it == powers.end()) {
      SparseCountMatrix b = propagation_matrix(data.graph, spec.propagation);
      if (key.second) b = add_self_loops(b);
      it = powers.emplace(key, support_powers(b, k_max)).first;
    }
    return density(it->second[spec.k]);
  };

  SweepTable table;
  for (const ModelSpec& tmpl : templates) {
    for (std::size_t k : ks) {
      ModelSpec spec = tmpl;
      spec.k = k;
      SweepRow row{to_string(spec.arch), k, to_string(spec.norm), to_string(spec.propagation)};
      row.density = density_of(spec);
      std::vector<RunMetrics> results;
      std::vector<std::string> errors;
      try {
        PreparedModel model = prepare_model(spec, data.graph);
        run_splits(model, data, splits, cfg, results, errors);
        Metrics m = collect(results, errors);
        row.acc_mean = m.test_mean;
        row.acc_std = m.test_std;
        row.failures = m.failures.size();
      } catch (const std::exception&) {
        row.failures = splits.size();
      }
      if (row.failures == splits.size()) {
        row.acc_mean = std::numeric_limits<double>::quiet_NaN();
        row.acc_std = std::numeric_limits<double>::quiet_NaN();
      }
      table.push_back(std::move(row));
    }
  }
  return table;
}

std::string to_string(SynthKind k) {
  switch (k) {
    case SynthKind::structure_only:
      return "structure_only";
    case SynthKind::hybrid:
      return "hybrid";
    case SynthKind::sparse_digraph_deep:
      return "sparse_digraph_deep";
  }
  return "unknown";
}

std::optional<SynthKind> parse_synth_kind(std::string_view s) {
  for (SynthKind k : {SynthKind::structure_only, SynthKind::hybrid, SynthKind::sparse_digraph_deep}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::size_t two_walk_band(Count walks) {
  if (walks <= 2) return 0;
  if (walks <= 6) return 1;
  if (walks <= 14) return 2;
  return 3;
}

namespace {

// `count` distinct members of `pool`, none equal to `self`.
std::vector<std::size_t> pick_distinct(const std::vector<std::size_t>& pool, std::size_t count,
                                       std::size_t self, Rng& rng) {
  std::vector<std::size_t> picked;
  while (picked.size() < count) {
    std::size_t v = pool[uniform_index(rng, pool.size())];
    if (v == self || std::find(picked.begin(), picked.end(), v) != picked.end()) continue;
    picked.push_back(v);
  }
  return picked;
}

void apply_label_noise(std::vector<std::size_t>& labels, std::size_t n_classes, double noise, Rng& rng) {
  if (noise <= 0.0) return;
  for (std::size_t& y : labels) {
    if (uniform01(rng) < noise) y = (y + 1 + uniform_index(rng, n_classes - 1)) % n_classes;
  }
}

DenseMatrix class_mean_features(const std::vector<std::size_t>& labels, std::size_t n_classes,
                                std::size_t dim, double signal, Rng& rng) {
  DenseMatrix means(n_classes, dim);
  for (std::size_t c = 0; c < n_classes; ++c) {
    double sq = 0.0;
    for (double& v : means.row(c)) {
      v = normal01(rng);
      sq += v * v;
    }
    for (double& v : means.row(c)) v /= std::sqrt(sq);
  }
  DenseMatrix x(labels.size(), dim);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t d = 0; d < dim; ++d) x(i, d) = signal * means(labels[i], d) + normal01(rng);
  }
  return x;
}

std::vector<std::size_t> balanced_classes(std::size_t n, std::size_t n_classes, Rng& rng) {
  std::vector<std::size_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = i % n_classes;
  shuffle(y, rng);
  return y;
}

// Regular nodes have out-degree d in {1, 2}. Class 0 regulars point at d = 1
// regulars (2-walks = d); class c >= 1 regulars point at hubs of tier c whose
// out-degree is v_c in {3, 7, 15} (2-walks = d * v_c); a tier-c hub points at
// v_c regulars (2-walks in [v_c, 2 v_c]). The four bands never overlap.
DatasetBundle structure_only(std::size_t n, Rng& rng) {
  constexpr std::size_t kClasses = 4;
  const std::size_t tier_out[kClasses] = {1, 3, 7, 15};
  const std::size_t hubs_per_tier = std::max<std::size_t>(3, n / 100);
  if (n < 8 * hubs_per_tier + 32) throw InputError("structure_only needs at least 56 nodes");

  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  shuffle(ids, rng);

  std::vector<std::size_t> total(kClasses);
  for (std::size_t c = 0; c < kClasses; ++c) total[c] = n / kClasses + (c < n % kClasses ? 1 : 0);
  const std::size_t n_regular = n - 3 * hubs_per_tier;

  std::vector<std::size_t> labels(n);
  std::vector<std::size_t> regular(ids.begin(), ids.begin() + static_cast<long>(n_regular));
  std::vector<std::vector<std::size_t>> hubs(kClasses);
  for (std::size_t t = 1; t < kClasses; ++t) {
    for (std::size_t h = 0; h < hubs_per_tier; ++h) {
      std::size_t v = ids[n_regular + (t - 1) * hubs_per_tier + h];
      hubs[t].push_back(v);
      labels[v] = t;
    }
  }
  std::vector<std::size_t> regular_class;
  for (std::size_t c = 0; c < kClasses; ++c) {
    regular_class.insert(regular_class.end(), total[c] - (c == 0 ? 0 : hubs_per_tier), c);
  }
  shuffle(regular_class, rng);

  std::vector<std::size_t> out_degree(n, 0);
  std::vector<std::size_t> unit_regulars;
  for (std::size_t r = 0; r < n_regular; ++r) {
    const std::size_t v = regular[r];
    labels[v] = regular_class[r];
    out_degree[v] = r < 3 ? 1 : 1 + uniform_index(rng, 2);
    if (out_degree[v] == 1) unit_regulars.push_back(v);
  }

  std::vector<Edge> edges;
  for (std::size_t v : regular) {
    const std::vector<std::size_t>& pool = labels[v] == 0 ? unit_regulars : hubs[labels[v]];
    for (std::size_t w : pick_distinct(pool, out_degree[v], v, rng)) edges.emplace_back(v, w);
  }
  for (std::size_t t = 1; t < kClasses; ++t) {
    for (std::size_t h : hubs[t]) {
      for (std::size_t w : pick_distinct(regular, tier_out[t], h, rng)) edges.emplace_back(h, w);
    }
  }

  DatasetBundle b;
  b.name = "structure_only";
  b.graph = from_edge_list(edges, n);
  b.features = uniform_features(n);
  b.uniform_features = true;
  b.labels = std::move(labels);
  b.n_classes = kClasses;
  return b;
}

DatasetBundle hybrid(std::size_t n, const SynthOptions& opt, Rng& rng) {
  constexpr std::size_t kClasses = 4;
  if (n < 4 * kClasses) throw InputError("hybrid needs at least 16 nodes");
  std::vector<std::size_t> labels = balanced_classes(n, kClasses, rng);
  std::vector<std::vector<std::size_t>> members(kClasses);
  for (std::size_t v = 0; v < n; ++v) members[labels[v]].push_back(v);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t degree = 1 + uniform_index(rng, 3);
    std::vector<std::size_t> targets;
    while (targets.size() < degree) {
      std::size_t w;
      if (uniform01(rng) < opt.homophily) {
        const auto& same = members[labels[v]];
        w = same[uniform_index(rng, same.size())];
      } else {
        std::size_t c = (labels[v] + 1 + uniform_index(rng, kClasses - 1)) % kClasses;
        w = members[c][uniform_index(rng, members[c].size())];
      }
      if (w == v || std::find(targets.begin(), targets.end(), w) != targets.end()) continue;
      targets.push_back(w);
    }
    for (std::size_t w : targets) edges.emplace_back(v, w);
  }

  DatasetBundle b;
  b.name = "hybrid";
  b.graph = from_edge_list(edges, n);
  b.features = class_mean_features(labels, kClasses, 16, opt.feature_signal, rng);
  b.labels = std::move(labels);
  b.n_classes = kClasses;
  return b;
}

DatasetBundle sparse_digraph_deep(std::size_t n, const SynthOptions& opt, Rng& rng) {
  constexpr std::size_t kClasses = 3;
  if (n < 3 * kClasses) throw InputError("sparse_digraph_deep needs at least 9 nodes");
  std::vector<std::size_t> labels = balanced_classes(n, kClasses, rng);
  std::vector<std::vector<std::size_t>> members(kClasses);
  for (std::size_t v = 0; v < n; ++v) members[labels[v]].push_back(v);

  std::vector<Edge> edges;
  for (auto& group : members) {
    shuffle(group, rng);
    for (std::size_t i = 0; i < group.size(); ++i) {
      edges.emplace_back(group[i], group[(i + 1) % group.size()]);
      if (uniform01(rng) < 0.3) {
        std::size_t w = group[uniform_index(rng, group.size())];
        if (w != group[i]) edges.emplace_back(group[i], w);
      }
    }
  }

  DatasetBundle b;
  b.name = "sparse_digraph_deep";
  b.graph = deduplicate(from_edge_list(edges, n));
  b.features = class_mean_features(labels, kClasses, 8, opt.feature_signal, rng);
  b.labels = std::move(labels);
  b.n_classes = kClasses;
  return b;
}

}  // namespace

DatasetBundle synthesize_dataset(SynthKind kind, std::size_t n, std::uint64_t seed, const SynthOptions& opt) {
  if (!(opt.noise >= 0.0 && opt.noise <= 1.0)) throw InputError("noise must be in [0, 1]");
  if (!(opt.homophily >= 0.0 && opt.homophily <= 1.0)) throw InputError("homophily must be in [0, 1]");
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
  DatasetBundle b;
  switch (kind) {
    case SynthKind::structure_only:
      b = structure_only(n, rng);
      break;
    case SynthKind::hybrid:
      b = hybrid(n, opt, rng);
      break;
    case SynthKind::sparse_digraph_deep:
      b = sparse_digraph_deep(n, opt, rng);
      break;
  }
  apply_label_noise(b.labels, b.n_classes, opt.noise, rng);
  return b;
}

}  // namespace hopscope

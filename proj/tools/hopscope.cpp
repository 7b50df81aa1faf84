// hopscope: walk-count analysis and message-passing experiments from the shell.
//
// Exit codes: 0 ok, 1 a checked property failed, 2 bad input.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hopscope/data_io.hpp"
#include "hopscope/edge_list.hpp"
#include "hopscope/error.hpp"
#include "hopscope/gradcheck.hpp"
#include "hopscope/hop_algebra.hpp"
#include "hopscope/mpnn.hpp"
#include "hopscope/normalization.hpp"
#include "hopscope/training.hpp"

namespace fs = std::filesystem;
using namespace hopscope;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kBadInput = 2;

constexpr double kGradTolerance = 1e-4;

// Resolved settings, printed before every run.
class ConfigEcho {
 public:
  template <typename T>
  void add(std::string key, const T& value) {
    std::ostringstream s;
    s << value;
    entries_.emplace_back(std::move(key), s.str());
  }
  void print(const std::string& command) const {
    std::cout << "# hopscope " << command << '\n';
    for (const auto& [k, v] : entries_) std::cout << "#   " << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

template <typename T>
const T& require(const std::optional<T>& v, const std::string& what, const std::string& token) {
  if (!v) throw InputError("unknown " + what + " '" + token + "'");
  return *v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------- options

struct GraphOpts {
  std::string graph;
  bool self_loops = false;
  bool symmetrize = false;
  bool dedup = false;

  void attach(CLI::App* app) {
    app->add_option("--graph", graph, "edge-list file")->required();
    app->add_flag("--self-loops", self_loops, "add I before analysis");
    app->add_flag("--symmetrize", symmetrize, "use A + A^T");
    app->add_flag("--dedup", dedup, "collapse parallel edges");
  }
  SparseCountMatrix load(ConfigEcho& echo) const {
    echo.add("graph", graph);
    echo.add("dedup", dedup);
    echo.add("symmetrize", symmetrize);
    echo.add("self_loops", self_loops);
    SparseCountMatrix a = read_edge_list(fs::path(graph));
    if (dedup) a = deduplicate(a);
    if (symmetrize) a = hopscope::symmetrize(a);
    if (self_loops) a = add_self_loops(a);
    return a;
  }
};

struct DataOpts {
  std::string dataset;
  std::string synth;
  std::size_t n = 400;
  double noise = 0.0;
  double signal = 1.0;
  double homophily = 0.85;
  bool dedup = false;

  void attach(CLI::App* app) {
    auto* d = app->add_option("--dataset", dataset, "dataset directory or name under $HOPSCOPE_DATA_DIR");
    auto* s = app->add_option("--synth", synth, "structure_only | hybrid | sparse_digraph_deep");
    d->excludes(s);
    app->add_option("--n", n, "synthetic node count")->capture_default_str();
    app->add_option("--noise", noise, "synthetic label noise")->capture_default_str();
    app->add_option("--signal", signal, "synthetic feature signal")->capture_default_str();
    app->add_option("--homophily", homophily, "hybrid edge homophily")->capture_default_str();
    app->add_flag("--dedup", dedup, "collapse parallel edges of a loaded dataset");
  }
  DatasetBundle load(std::uint64_t seed, ConfigEcho& echo) const {
    if (dataset.empty() == synth.empty()) throw InputError("give exactly one of --dataset or --synth");
    if (!dataset.empty()) {
      fs::path dir = resolve_dataset_path(dataset);
      echo.add("dataset", dir.string());
      echo.add("dedup", dedup);
      return load_dataset(dir, dedup);
    }
    SynthKind kind = require(parse_synth_kind(synth), "synthetic kind", synth);
    echo.add("synth", synth);
    echo.add("n", n);
    echo.add("noise", noise);
    echo.add("signal", signal);
    echo.add("homophily", homophily);
    return synthesize_dataset(kind, n, seed, SynthOptions{noise, signal, homophily});
  }
};

struct ModelOpts {
  std::string arch = "k_layer_gcn";
  std::size_t k = 2;
  std::size_t hidden = 16;
  std::string activation = "relu";
  std::string norm = "sym";
  std::string prop = "forward";

  void attach(CLI::App* app, bool with_arch_and_k) {
    if (with_arch_and_k) {
      app->add_option("--arch", arch, "architecture")->capture_default_str();
      app->add_option("--k", k, "depth / hop count")->capture_default_str();
    }
    app->add_option("--hidden", hidden, "hidden width")->capture_default_str();
    app->add_option("--activation", activation, "relu | identity")->capture_default_str();
    app->add_option("--norm", norm, "none | row | sym | dir")->capture_default_str();
    app->add_option("--prop", prop, "forward | reverse | bidirectional")->capture_default_str();
  }
  ModelSpec spec(ConfigEcho& echo, bool with_arch_and_k = true) const {
    ModelSpec s;
    if (with_arch_and_k) {
      s.arch = require(parse_arch(arch), "architecture", arch);
      s.k = k;
      echo.add("arch", arch);
      echo.add("k", k);
    }
    s.hidden_width = hidden;
    s.activation = require(parse_activation(activation), "activation", activation);
    s.norm = require(parse_norm_scheme(norm), "normalization", norm);
    s.propagation = require(parse_propagation(prop), "propagation", prop);
    echo.add("hidden", hidden);
    echo.add("activation", activation);
    echo.add("norm", norm);
    echo.add("prop", prop);
    return s;
  }
};

struct TrainOpts {
  TrainConfig cfg;
  bool paper_protocol = false;
  std::size_t splits = 10;
  std::size_t per_class_train = 20;
  std::size_t per_class_val = 30;

  void attach(CLI::App* app) {
    app->add_option("--lr", cfg.lr)->capture_default_str();
    app->add_option("--l2", cfg.l2)->capture_default_str();
    app->add_option("--dropout", cfg.dropout)->capture_default_str();
    app->add_option("--max-epochs", cfg.max_epochs)->capture_default_str();
    app->add_option("--patience", cfg.early_stop_patience, "early-stopping patience")->capture_default_str();
    app->add_option("--lr-patience", cfg.lr_sched_patience, "epochs without improvement per lr halving")
        ->capture_default_str();
    app->add_flag("--paper-protocol", paper_protocol, "1500 epochs, patience 410, lr patience 80");
    app->add_option("--splits", splits)->capture_default_str();
    app->add_option("--per-class-train", per_class_train)->capture_default_str();
    app->add_option("--per-class-val", per_class_val)->capture_default_str();
  }
  TrainConfig resolve(CLI::App* app, std::uint64_t seed, ConfigEcho& echo) const {
    TrainConfig c = cfg;
    if (paper_protocol) {
      TrainConfig p = TrainConfig::paper_protocol();
      if (app->count("--max-epochs") == 0) c.max_epochs = p.max_epochs;
      if (app->count("--patience") == 0) c.early_stop_patience = p.early_stop_patience;
      if (app->count("--lr-patience") == 0) c.lr_sched_patience = p.lr_sched_patience;
    }
    c.seed = seed;
    c.validate();
    echo.add("lr", c.lr);
    echo.add("l2", c.l2);
    echo.add("dropout", c.dropout);
    echo.add("max_epochs", c.max_epochs);
    echo.add("patience", c.early_stop_patience);
    echo.add("lr_patience", c.lr_sched_patience);
    echo.add("splits", splits);
    echo.add("per_class_train", per_class_train);
    echo.add("per_class_val", per_class_val);
    return c;
  }
};

// ---------------------------------------------------------------- commands

struct AnalyzeLoops {
  GraphOpts graph;
  std::string lemma;
  std::size_t kmax = 5;
  std::size_t m = 0;
  std::string cycle;
  std::string out;

  void attach(CLI::App* app) {
    graph.attach(app);
    app->add_option("--lemma", lemma, "self_loop | two_node | m_node | dag")->required();
    app->add_option("--kmax", kmax)->capture_default_str();
    app->add_option("--m", m, "cycle length for m_node");
    app->add_option("--cycle", cycle, "explicit cycle for m_node, comma separated");
    app->add_option("--out", out, "CSV k,density,nnz,subset_holds");
  }

  int run() {
    ConfigEcho echo;
    SparseCountMatrix a = graph.load(echo);
    echo.add("lemma", lemma);
    echo.add("kmax", kmax);
    if (kmax < 1) throw InputError("--kmax must be at least 1");
    if (lemma == "dag") {
      echo.print("analyze-loops");
      return run_dag(a);
    }
    std::optional<LoopLemma> which;
    for (LoopLemma l : {LoopLemma::self_loop, LoopLemma::two_node, LoopLemma::m_node}) {
      if (lemma == to_string(l)) which = l;
    }
    require(which, "lemma", lemma);
    std::vector<std::size_t> nodes;
    for (const std::string& tok : split_list(cycle)) {
      try {
        nodes.push_back(std::stoul(tok));
      } catch (const std::exception&) {
        throw InputError("--cycle: '" + tok + "' is not a node id");
      }
    }
    if (*which == LoopLemma::m_node) {
      echo.add("m", m);
      echo.add("cycle", cycle);
    }
    echo.print("analyze-loops");

    LoopLemmaReport report;
    try {
      report = verify_loop_lemma(a, *which, kmax, m, nodes);
    } catch (const HypothesisError& e) {
      std::cout << "HYPOTHESIS UNSATISFIED: " << e.what() << "\nno inclusion asserted\n";
      if (!out.empty()) open_out(out) << "k,density,nnz,subset_holds\n";
      return kOk;
    }
    std::cout << "lemma " << to_string(report.lemma) << ", shift " << report.shift;
    if (!report.cycle.empty()) {
      std::cout << ", cycle";
      for (std::size_t v : report.cycle) std::cout << ' ' << v;
    }
    std::cout << '\n';
    std::cout << "k\tdensity\tnnz\tinclusion\n";
    for (const LoopCheck& c : report.checks) {
      std::cout << c.k << '\t' << format_real(c.density) << '\t' << c.nnz << '\t'
                << (c.holds ? "pass" : "FAIL") << '\n';
    }
    if (!out.empty()) {
      auto f = open_out(out);
      f << "k,density,nnz,subset_holds\n";
      for (const LoopCheck& c : report.checks) {
        f << c.k << ',' << format_real(c.density) << ',' << c.nnz << ',' << (c.holds ? 1 : 0) << '\n';
      }
    }
    if (report.all_hold()) {
      std::cout << "all inclusions hold\n";
      return kOk;
    }
    const Counterexample& ce = *report.first_counterexample;
    std::cout << "VIOLATION at k=" << ce.k << ": (" << ce.i << ", " << ce.j << ")\n";
    return kViolation;
  }

  int run_dag(const SparseCountMatrix& a) {
    DagProfile prof = dag_profile(a);
    if (!prof.is_dag) {
      std::cout << "HYPOTHESIS UNSATISFIED: graph has a directed cycle\nno nilpotency asserted\n";
      if (!out.empty()) open_out(out) << "k,density,nnz,subset_holds\n";
      return kOk;
    }
    const std::size_t h = prof.longest_path_len;
    std::cout << "longest path h = " << h << '\n';
    auto powers = support_powers(a, h + 1);
    bool ok = true;
    std::ostringstream csv;
    csv << "k,density,nnz,subset_holds\n";
    std::cout << "k\tdensity\tnnz\texpected\n";
    for (std::size_t k = 1; k <= h + 1; ++k) {
      const std::size_t nnz = powers[k].count();
      const bool expected = k <= h ? nnz > 0 : nnz == 0;
      ok = ok && expected;
      std::cout << k << '\t' << format_real(density(powers[k])) << '\t' << nnz << '\t'
                << (expected ? "pass" : "FAIL") << '\n';
      csv << k << ',' << format_real(density(powers[k])) << ',' << nnz << ',' << (expected ? 1 : 0) << '\n';
    }
    if (!out.empty()) open_out(out) << csv.str();
    std::cout << (ok ? "A^(h+1) = 0 and A^h != 0\n" : "VIOLATION of nilpotency index\n");
    return ok ? kOk : kViolation;
  }
};

struct DensityCurve {
  GraphOpts graph;
  std::string prop = "forward";
  std::size_t kmax = 10;
  std::size_t k_cap = 64;
  std::string out;

  void attach(CLI::App* app) {
    graph.attach(app);
    app->add_option("--prop", prop, "forward | reverse | bidirectional")->capture_default_str();
    app->add_option("--kmax", kmax)->capture_default_str();
    app->add_option("--k-cap", k_cap, "search bound for support periodicity")->capture_default_str();
    app->add_option("--out", out, "CSV k,density,nnz");
  }

  int run() {
    ConfigEcho echo;
    SparseCountMatrix a = graph.load(echo);
    Propagation p = require(parse_propagation(prop), "propagation", prop);
    echo.add("prop", prop);
    echo.add("kmax", kmax);
    echo.add("k_cap", k_cap);
    echo.print("density-curve");
    const SparseCountMatrix b = propagation_matrix(a, p);
    auto powers = support_powers(b, kmax);
    std::ostringstream csv;
    csv << "k,density,nnz\n";
    std::cout << "k\tdensity\tnnz\n";
    for (std::size_t k = 1; k <= kmax; ++k) {
      std::cout << k << '\t' << format_real(density(powers[k])) << '\t' << powers[k].count() << '\n';
      csv << k << ',' << format_real(density(powers[k])) << ',' << powers[k].count() << '\n';
    }
    DagProfile prof = dag_profile(b);
    if (prof.is_dag) {
      std::cout << "acyclic: support vanishes from k = " << prof.longest_path_len + 1 << '\n';
    } else if (k_cap >= 2) {
      if (auto per = support_periodicity(b, k_cap)) {
        std::cout << "support periodic: preperiod " << per->preperiod << ", period " << per->period << '\n';
      } else {
        std::cout << "support not periodic within k <= " << k_cap << '\n';
      }
    }
    if (!out.empty()) open_out(out) << csv.str();
    return kOk;
  }
};

struct Normalize {
  GraphOpts graph;
  std::string norm = "sym";
  std::string prop = "forward";
  std::string out;

  void attach(CLI::App* app) {
    graph.attach(app);
    app->add_option("--norm", norm, "none | row | sym | dir")->capture_default_str();
    app->add_option("--prop", prop, "forward | reverse | bidirectional")->capture_default_str();
    app->add_option("--out", out, "matrix CSV")->required();
  }

  int run() {
    ConfigEcho echo;
    // Self-loops go on after the propagation matrix is formed.
    const bool loops = graph.self_loops;
    graph.self_loops = false;
    SparseCountMatrix a = graph.load(echo);
    echo.add("add_self_loops_after_prop", loops);
    NormScheme scheme = require(parse_norm_scheme(norm), "normalization", norm);
    Propagation p = require(parse_propagation(prop), "propagation", prop);
    echo.add("norm", norm);
    echo.add("prop", prop);
    echo.add("out", out);
    echo.print("normalize");
    SparseCountMatrix b = propagation_matrix(a, p);
    if (loops) b = add_self_loops(b);
    WeightedAdjacency w = normalize(b, scheme);
    save_matrix_csv(w, out);
    std::cout << "nodes " << w.n_rows() << ", non-zeros " << w.nnz() << ", degenerate rows "
              << w.degenerate_rows << '\n';
    return kOk;
  }
};

struct Train {
  DataOpts data;
  ModelOpts model;
  TrainOpts train;
  std::uint64_t seed = 0;
  std::string out;
  std::string grad_out;
  CLI::App* app = nullptr;

  void attach(CLI::App* a) {
    app = a;
    data.attach(a);
    model.attach(a, true);
    train.attach(a);
    a->add_option("--seed", seed)->capture_default_str();
    a->add_option("--out", out, "per-split CSV");
    a->add_option("--grad-out", grad_out, "per-epoch gradient norms CSV");
  }

  int run() {
    ConfigEcho echo;
    echo.add("seed", seed);
    DatasetBundle bundle = data.load(seed, echo);
    ModelSpec spec = model.spec(echo);
    TrainConfig cfg = train.resolve(app, seed, echo);
    echo.print("train");
    auto splits = make_splits(bundle.labels, train.splits, seed, train.per_class_train, train.per_class_val);
    Metrics m = train_splits(spec, bundle, splits, cfg);

    std::cout << "split\ttest_acc\tval_acc\tmajority\tbest_epoch\tepochs\n";
    std::size_t r = 0;
    std::ostringstream runs_csv, grads_csv;
    runs_csv << "split,test_acc,val_acc,majority_acc,best_epoch,epochs_run\n";
    grads_csv << "split,epoch,layer,grad_norm\n";
    for (std::size_t s = 0, f = 0; s < splits.size(); ++s) {
      // Failures are listed in split order, so the next one belongs to split s if its prefix says so.
      const std::string prefix = "split " + std::to_string(s) + ":";
      if (f < m.failures.size() && m.failures[f].rfind(prefix, 0) == 0) {
        std::cout << s << "\tFAILED\t" << m.failures[f] << '\n';
        runs_csv << s << ",nan,nan,nan,,\n";
        ++f;
        continue;
      }
      const RunMetrics& run = m.runs[r++];
      std::cout << s << '\t' << format_real(run.test_acc) << '\t' << format_real(run.val_acc) << '\t'
                << format_real(run.majority_acc) << '\t' << run.best_epoch << '\t' << run.epochs_run << '\n';
      runs_csv << s << ',' << format_real(run.test_acc) << ',' << format_real(run.val_acc) << ','
               << format_real(run.majority_acc) << ',' << run.best_epoch << ',' << run.epochs_run << '\n';
      for (std::size_t e = 0; e < run.grad_norms.size(); ++e) {
        for (std::size_t l = 0; l < run.grad_norms[e].size(); ++l) {
          grads_csv << s << ',' << e << ',' << l << ',' << format_real(run.grad_norms[e][l]) << '\n';
        }
      }
    }
    std::cout << "test accuracy " << format_real(m.test_mean) << " +- " << format_real(m.test_std)
              << " over " << m.runs.size() << " runs (majority baseline " << format_real(m.majority_mean)
              << ", failures " << m.failures.size() << ")\n";
    if (!out.empty()) open_out(out) << runs_csv.str();
    if (!grad_out.empty()) open_out(grad_out) << grads_csv.str();
    return m.runs.empty() ? kViolation : kOk;
  }
};

struct Sweep {
  DataOpts data;
  ModelOpts model;
  TrainOpts train;
  std::string arches = "k_layer_gcn,one_layer_power_k,hybrid_power_plus_linear";
  std::size_t kmin = 1;
  std::size_t kmax = 10;
  std::uint64_t seed = 0;
  std::string out = "sweep.csv";
  std::string density_out;
  CLI::App* app = nullptr;

  void attach(CLI::App* a) {
    app = a;
    data.attach(a);
    model.attach(a, false);
    train.attach(a);
    a->add_option("--arches", arches, "comma-separated architectures")->capture_default_str();
    a->add_option("--kmin", kmin)->capture_default_str();
    a->add_option("--kmax", kmax)->capture_default_str();
    a->add_option("--seed", seed)->capture_default_str();
    a->add_option("--out", out, "sweep CSV")->capture_default_str();
    a->add_option("--density-out", density_out, "density CSV (default: <out>_density.csv)");
  }

  int run() {
    ConfigEcho echo;
    echo.add("seed", seed);
    DatasetBundle bundle = data.load(seed, echo);
    ModelSpec base = model.spec(echo, false);
    TrainConfig cfg = train.resolve(app, seed, echo);
    if (kmin < 1 || kmax < kmin) throw InputError("need 1 <= --kmin <= --kmax");
    std::vector<ModelSpec> templates;
    for (const std::string& name : split_list(arches)) {
      ModelSpec s = base;
      s.arch = require(parse_arch(name), "architecture", name);
      templates.push_back(s);
    }
    if (templates.empty()) throw InputError("--arches is empty");
    fs::path out_path(out);
    fs::path density_path = density_out.empty()
                                ? out_path.parent_path() / (out_path.stem().string() + "_density.csv")
                                : fs::path(density_out);
    echo.add("arches", arches);
    echo.add("kmin", kmin);
    echo.add("kmax", kmax);
    echo.add("out", out_path.string());
    echo.add("density_out", density_path.string());
    echo.print("sweep");

    std::vector<std::size_t> ks;
    for (std::size_t k = kmin; k <= kmax; ++k) ks.push_back(k);
    SweepTable table =
        run_sweep(templates, ks, bundle, cfg, SweepOptions{train.splits, train.per_class_train, train.per_class_val});
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    save_sweep_csv(table, out_path);

    std::ostringstream dens;
    dens << "arch,k,density\n";
    std::size_t failed = 0, total = 0;
    std::cout << "arch\tk\tacc_mean\tacc_std\tdensity\tfailures\n";
    for (const SweepRow& r : table) {
      std::cout << r.arch << '\t' << r.k << '\t' << format_real(r.acc_mean) << '\t' << format_real(r.acc_std)
                << '\t' << format_real(r.density) << '\t' << r.failures << '\n';
      dens << r.arch << ',' << r.k << ',' << format_real(r.density) << '\n';
      failed += r.failures;
      total += train.splits;
    }
    open_out(density_path) << dens.str();
    if (total > 0 && failed == total) {
      std::cout << "every run failed\n";
      return kViolation;
    }
    return kOk;
  }
};

struct GradCheck {
  ModelOpts model;
  std::uint64_t seed = 0;
  std::size_t n = 10;
  double step = 1e-4;
  double corrupt = 0.0;
  std::string out;

  void attach(CLI::App* app) {
    model.attach(app, true);
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--n", n, "nodes in the random instance")->capture_default_str();
    app->add_option("--step", step, "finite-difference step")->capture_default_str();
    app->add_option("--corrupt", corrupt, "perturb one analytic gradient entry (checker self-test)")
        ->group("");
    app->add_option("--out", out, "CSV layer,max_rel_error");
  }

  int run() {
    ConfigEcho echo;
    ModelSpec spec = model.spec(echo);
    echo.add("seed", seed);
    echo.add("n", n);
    echo.add("step", step);
    if (corrupt != 0.0) echo.add("corrupt", corrupt);
    echo.print("gradcheck");
    GradCheckInstance inst = make_gradcheck_instance(spec, seed, n);
    GradCheckResult r = gradient_check(inst.model, inst.features, inst.params, inst.upstream, step, corrupt);
    std::cout << "parameters " << r.n_parameters << ", kink resamples " << inst.resamples << '\n';
    std::ostringstream csv;
    csv << "layer,max_rel_error\n";
    for (std::size_t l = 0; l < r.per_layer.size(); ++l) {
      std::cout << "layer " << l << ": " << format_real(r.per_layer[l]) << '\n';
      csv << l << ',' << format_real(r.per_layer[l]) << '\n';
    }
    std::cout << "max relative error " << format_real(r.max_relative_error) << " (tolerance "
              << format_real(kGradTolerance) << ")\n";
    if (!out.empty()) open_out(out) << csv.str();
    return r.max_relative_error <= kGradTolerance ? kOk : kViolation;
  }

};

struct Synth {
  std::string kind;
  std::size_t n = 400;
  std::uint64_t seed = 0;
  SynthOptions opt;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "structure_only | hybrid | sparse_digraph_deep")->required();
    app->add_option("--n", n)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--noise", opt.noise)->capture_default_str();
    app->add_option("--signal", opt.feature_signal)->capture_default_str();
    app->add_option("--homophily", opt.homophily)->capture_default_str();
    app->add_option("--out", out, "dataset directory")->required();
  }

  int run() {
    ConfigEcho echo;
    SynthKind k = require(parse_synth_kind(kind), "synthetic kind", kind);
    echo.add("kind", kind);
    echo.add("n", n);
    echo.add("seed", seed);
    echo.add("noise", opt.noise);
    echo.add("signal", opt.feature_signal);
    echo.add("homophily", opt.homophily);
    echo.add("out", out);
    echo.print("synth");
    DatasetBundle b = synthesize_dataset(k, n, seed, opt);
    save_dataset(b, out);
    DatasetStats s = compute_stats(b);
    std::cout << "nodes " << s.n_nodes << ", edges " << s.n_edges << ", classes " << s.n_classes
              << ", features " << s.n_features << ", %no-in " << format_real(s.pct_no_in) << ", %no-out "
              << format_real(s.pct_no_out) << '\n';
    return kOk;
  }
};

// Flat key=value lines become --key=value flags placed right after the
// subcommand, ahead of the real command line, so explicit flags win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string file;
  std::vector<std::string> rest;
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (file.empty() || args.size() < 2) return args;
  std::ifstream in(file);
  if (!in) throw InputError("cannot open config file " + file);
  std::vector<std::string> out{args[0], args[1]};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#' || line[first] == ';' || line[first] == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(file + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r\"");
      const auto e = t.find_last_not_of(" \t\r\"");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key[0] == '-') key.erase(0, 1);
    std::replace(key.begin(), key.end(), '_', '-');
    out.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hopscope: adjacency-power analysis and message-passing experiments"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;

  AnalyzeLoops analyze;
  DensityCurve curve;
  Normalize norm;
  Train train;
  Sweep sweep;
  GradCheck grad;
  Synth synth;

  struct Entry {
    const char* name;
    const char* help;
    std::function<void(CLI::App*)> attach;
    std::function<int()> run;
  };
  const std::vector<Entry> entries = {
      {"analyze-loops", "check loop-driven support inclusions or DAG nilpotency",
       [&](CLI::App* a) { analyze.attach(a); }, [&] { return analyze.run(); }},
      {"density-curve", "support density of B^k for k = 1..kmax", [&](CLI::App* a) { curve.attach(a); },
       [&] { return curve.run(); }},
      {"normalize", "write a normalized adjacency as CSV", [&](CLI::App* a) { norm.attach(a); },
       [&] { return norm.run(); }},
      {"train", "train one architecture over several splits", [&](CLI::App* a) { train.attach(a); },
       [&] { return train.run(); }},
      {"sweep", "architecture x depth accuracy sweep", [&](CLI::App* a) { sweep.attach(a); },
       [&] { return sweep.run(); }},
      {"gradcheck", "finite-difference check of the backward pass", [&](CLI::App* a) { grad.attach(a); },
       [&] { return grad.run(); }},
      {"synth", "write a synthetic dataset directory", [&](CLI::App* a) { synth.attach(a); },
       [&] { return synth.run(); }},
  };
  std::vector<CLI::App*> subs;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_file, "flat key=value file; command-line flags take precedence");
    e.attach(sub);
    subs.push_back(sub);
  }

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kBadInput;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (subs[i]->parsed()) return entries[i].run();
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kBadInput;
  } catch (const LoadError& e) {
    std::cerr << "load error: " << e.what() << '\n';
    return kBadInput;
  } catch (const OverflowError& e) {
    std::cerr << "overflow: " << e.what() << '\n';
    return kBadInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kViolation;
  }
  return kBadInput;
}

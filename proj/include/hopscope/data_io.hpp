#pragma once

// Dataset directories and CSV artifacts.
//
// A dataset directory holds
//   edges.tsv     edge list (see edge_list.hpp); ids may be any tokens unless
//                 a %nodes header is present, in which case they are 0..N-1
//   labels.tsv    node<TAB>class, one line per node
//   features.csv  optional; node,f1,...,fd per line
// External node ids are remapped to dense indices in ascending order (numeric
// when every id is an integer, lexicographic otherwise).

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hopscope/dense.hpp"
#include "hopscope/graph.hpp"
#include "hopscope/weighted.hpp"

namespace hopscope {

struct DatasetBundle {
  std::string name;
  SparseCountMatrix graph;
  DenseMatrix features;          // n x 1 ones when uniform_features
  bool uniform_features = false;
  std::vector<std::size_t> labels;
  std::size_t n_classes = 0;
};

struct DatasetStats {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;  // distinct (src, dst) pairs
  Count edge_mass = 0;      // with multiplicity
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  double pct_no_in = 0.0;   // nodes without in-neighbors, percent
  double pct_no_out = 0.0;
};

DatasetStats compute_stats(const DatasetBundle& bundle);

// Throws LoadError for missing files, ragged feature rows, unknown or
// unlabeled nodes.
DatasetBundle load_dataset(const std::filesystem::path& dir, bool dedup = false);

// Writes edges.tsv (with %nodes header), labels.tsv and, unless the features
// are uniform, features.csv.
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir);

// An existing path is returned as is; otherwise the name is looked up under
// $HOPSCOPE_DATA_DIR when that is set.
std::filesystem::path resolve_dataset_path(std::string_view name_or_path);

// 12 significant digits, '.' decimal separator.
std::string format_real(double v);

// "# shape,R,C" line, then header "row,col,value", then entries row-major.
void save_matrix_csv(const SparseCountMatrix& m, const std::filesystem::path& path);
void save_matrix_csv(const WeightedAdjacency& m, const std::filesystem::path& path);
SparseCountMatrix load_count_matrix_csv(const std::filesystem::path& path);
WeightedAdjacency load_weighted_matrix_csv(const std::filesystem::path& path);

struct SweepRow {
  std::string arch;
  std::size_t k = 0;
  std::string norm;
  std::string propagation;
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double density = 0.0;
  std::size_t failures = 0;
};

using SweepTable = std::vector<SweepRow>;

// Header arch,k,norm,propagation,acc_mean,acc_std,density,failures.
void save_sweep_csv(const SweepTable& table, const std::filesystem::path& path);
SweepTable load_sweep_csv(const std::filesystem::path& path);

}  // namespace hopscope

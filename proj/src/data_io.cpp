#include "hopscope/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "hopscope/edge_list.hpp"
#include "hopscope/error.hpp"

namespace hopscope {

namespace fs = std::filesystem;

namespace {

std::optional<long long> as_integer(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_real(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw LoadError(where + ": '" + s + "' is not a number");
  }
  return v;
}

std::size_t parse_size(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw LoadError(where + ": '" + s + "' is not a non-negative integer");
  }
  return v;
}

// Dense ids for a set of tokens: numeric order when all are integers.
std::map<std::string, std::size_t> dense_ids(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  bool numeric = std::all_of(tokens.begin(), tokens.end(),
                             [](const std::string& t) { return as_integer(t).has_value(); });
  if (numeric) {
    std::sort(tokens.begin(), tokens.end(), [](const std::string& a, const std::string& b) {
      return *as_integer(a) < *as_integer(b);
    });
  }
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < tokens.size(); ++i) ids.emplace(tokens[i], i);
  return ids;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> whitespace_fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string f;
  while (in >> f) out.push_back(f);
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  return out;
}

bool getline_trimmed(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

struct RawEdges {
  std::optional<std::size_t> declared_nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

RawEdges read_raw_edges(const fs::path& path) {
  auto in = open_input(path);
  RawEdges raw;
  std::string line;
  std::size_t line_no = 0;
  while (getline_trimmed(in, line)) {
    ++line_no;
    auto f = whitespace_fields(line);
    if (f.empty() || f[0][0] == '#') continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    if (f[0] == "%nodes") {
      if (f.size() != 2) throw LoadError(where + ": %nodes needs one count");
      raw.declared_nodes = parse_size(f[1], where);
      continue;
    }
    if (f.size() != 2) throw LoadError(where + ": expected 'src<TAB>dst'");
    raw.edges.emplace_back(f[0], f[1]);
  }
  return raw;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

DatasetStats compute_stats(const DatasetBundle& bundle) {
  const SparseCountMatrix& a = bundle.graph;
  DatasetStats s;
  s.n_nodes = a.n_rows();
  s.n_edges = a.nnz();
  s.edge_mass = a.total_mass();
  s.n_features = bundle.features.cols();
  s.n_classes = bundle.n_classes;
  if (s.n_nodes == 0) return s;
  std::vector<bool> has_in(s.n_nodes, false);
  std::size_t no_out = 0;
  for (std::size_t i = 0; i < s.n_nodes; ++i) {
    if (a.row_cols(i).empty()) ++no_out;
    for (std::size_t j : a.row_cols(i)) has_in[j] = true;
  }
  const auto no_in = static_cast<std::size_t>(std::count(has_in.begin(), has_in.end(), false));
  s.pct_no_in = 100.0 * static_cast<double>(no_in) / static_cast<double>(s.n_nodes);
  s.pct_no_out = 100.0 * static_cast<double>(no_out) / static_cast<double>(s.n_nodes);
  return s;
}

DatasetBundle load_dataset(const fs::path& dir, bool dedup) {
  if (!fs::is_directory(dir)) throw LoadError("dataset directory not found: " + dir.string());
  const fs::path edges_path = dir / "edges.tsv";
  const fs::path labels_path = dir / "labels.tsv";
  const fs::path features_path = dir / "features.csv";
  if (!fs::exists(edges_path)) throw LoadError("missing " + edges_path.string());
  if (!fs::exists(labels_path)) throw LoadError("missing " + labels_path.string());

  RawEdges raw = read_raw_edges(edges_path);

  // Node id table.
  std::map<std::string, std::size_t> node_ids;
  std::size_t n = 0;
  if (raw.declared_nodes) {
    n = *raw.declared_nodes;
    for (std::size_t i = 0; i < n; ++i) node_ids.emplace(std::to_string(i), i);
  } else {
    std::vector<std::string> tokens;
    for (const auto& [s, d] : raw.edges) {
      tokens.push_back(s);
      tokens.push_back(d);
    }
    node_ids = dense_ids(std::move(tokens));
    n = node_ids.size();
  }
  auto lookup = [&](const std::string& token, const std::string& where) {
    auto it = node_ids.find(token);
    if (it == node_ids.end()) throw LoadError(where + ": unknown node '" + token + "'");
    return it->second;
  };

  std::vector<Edge> edges;
  edges.reserve(raw.edges.size());
  for (const auto& [s, d] : raw.edges) {
    edges.emplace_back(lookup(s, "edges.tsv"), lookup(d, "edges.tsv"));
  }

  DatasetBundle bundle;
  bundle.name = fs::absolute(dir).lexically_normal().filename().string();
  if (bundle.name.empty()) bundle.name = fs::absolute(dir).parent_path().filename().string();
  bundle.graph = from_edge_list(edges, n);
  if (dedup) bundle.graph = deduplicate(bundle.graph);

  // Labels.
  {
    auto in = open_input(labels_path);
    std::vector<std::optional<std::string>> class_token(n);
    std::string line;
    std::size_t line_no = 0;
    while (getline_trimmed(in, line)) {
      ++line_no;
      auto f = whitespace_fields(line);
      if (f.empty() || f[0][0] == '#') continue;
      const std::string where = "labels.tsv:" + std::to_string(line_no);
      if (f.size() != 2) throw LoadError(where + ": expected 'node<TAB>class'");
      std::size_t v = lookup(f[0], where);
      if (class_token[v]) throw LoadError(where + ": node '" + f[0] + "' labeled twice");
      class_token[v] = f[1];
    }
    std::vector<std::string> classes;
    for (std::size_t v = 0; v < n; ++v) {
      if (!class_token[v]) throw LoadError("labels.tsv: node index " + std::to_string(v) + " has no label");
      classes.push_back(*class_token[v]);
    }
    auto class_ids = dense_ids(classes);
    bundle.n_classes = class_ids.size();
    bundle.labels.resize(n);
    for (std::size_t v = 0; v < n; ++v) bundle.labels[v] = class_ids.at(*class_token[v]);
  }

  // Features.
  if (fs::exists(features_path)) {
    auto in = open_input(features_path);
    std::vector<std::vector<double>> rows(n);
    std::optional<std::size_t> dim;
    std::string line;
    std::size_t line_no = 0;
    while (getline_trimmed(in, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      const std::string where = "features.csv:" + std::to_string(line_no);
      auto f = split(line, ',');
      if (f.size() < 2) throw LoadError(where + ": expected 'node,f1,...'");
      if (dim && f.size() - 1 != *dim) {
        throw LoadError(where + ": ragged row with " + std::to_string(f.size() - 1) +
                        " features, expected " + std::to_string(*dim));
      }
      dim = f.size() - 1;
      std::size_t v = lookup(f[0], where);
      if (!rows[v].empty()) throw LoadError(where + ": duplicate features for '" + f[0] + "'");
      rows[v].reserve(*dim);
      for (std::size_t c = 1; c < f.size(); ++c) rows[v].push_back(parse_real(f[c], where));
    }
    if (!dim) throw LoadError("features.csv is empty");
    bundle.features = DenseMatrix(n, *dim);
    for (std::size_t v = 0; v < n; ++v) {
      if (rows[v].empty()) throw LoadError("features.csv: node index " + std::to_string(v) + " has no row");
      std::copy(rows[v].begin(), rows[v].end(), bundle.features.row(v).begin());
    }
  } else {
    bundle.features = DenseMatrix(n, 1, 1.0);
    bundle.uniform_features = true;
  }
  return bundle;
}

void save_dataset(const DatasetBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  write_edge_list(dir / "edges.tsv", bundle.graph);
  {
    auto out = open_output(dir / "labels.tsv");
    for (std::size_t v = 0; v < bundle.labels.size(); ++v) out << v << '\t' << bundle.labels[v] << '\n';
  }
  const fs::path features_path = dir / "features.csv";
  if (bundle.uniform_features) {
    fs::remove(features_path);
    return;
  }
  auto out = open_output(features_path);
  for (std::size_t v = 0; v < bundle.features.rows(); ++v) {
    out << v;
    for (double x : bundle.features.row(v)) out << ',' << format_real(x);
    out << '\n';
  }
}

fs::path resolve_dataset_path(std::string_view name_or_path) {
  fs::path p(name_or_path);
  if (fs::exists(p)) return p;
  if (const char* root = std::getenv("HOPSCOPE_DATA_DIR")) {
    fs::path candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

namespace {

template <typename Matrix, typename Fmt>
void save_csv(const Matrix& m, const fs::path& path, Fmt fmt) {
  auto out = open_output(path);
  out << "# shape," << m.n_rows() << ',' << m.n_cols() << '\n';
  out << "row,col,value\n";
  for (std::size_t i = 0; i < m.n_rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) out << i << ',' << cols[e] << ',' << fmt(vals[e]) << '\n';
  }
}

struct Triplets {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> col_idx;
  std::vector<std::string> values;
};

Triplets read_triplets(const fs::path& path) {
  auto in = open_input(path);
  Triplets t;
  std::string line;
  std::size_t line_no = 0;
  bool have_shape = false, have_header = false;
  std::size_t last_row = 0, last_col = 0;
  bool any = false;
  while (getline_trimmed(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    auto f = split(line, ',');
    if (!have_shape) {
      if (f.size() != 3 || f[0] != "# shape") throw LoadError(where + ": expected '# shape,R,C'");
      t.rows = parse_size(f[1], where);
      t.cols = parse_size(f[2], where);
      t.offsets.assign(t.rows + 1, 0);
      have_shape = true;
      continue;
    }
    if (!have_header) {
      if (line != "row,col,value") throw LoadError(where + ": expected header 'row,col,value'");
      have_header = true;
      continue;
    }
    if (f.size() != 3) throw LoadError(where + ": expected 'row,col,value'");
    std::size_t r = parse_size(f[0], where), c = parse_size(f[1], where);
    if (r >= t.rows || c >= t.cols) throw LoadError(where + ": entry outside the declared shape");
    if (any && (r < last_row || (r == last_row && c <= last_col))) {
      throw LoadError(where + ": entries must be sorted row-major without duplicates");
    }
    any = true;
    last_row = r;
    last_col = c;
    ++t.offsets[r + 1];
    t.col_idx.push_back(c);
    t.values.push_back(f[2]);
  }
  if (!have_header) throw LoadError(path.string() + ": truncated matrix file");
  for (std::size_t i = 0; i < t.rows; ++i) t.offsets[i + 1] += t.offsets[i];
  return t;
}

}  // namespace

void save_matrix_csv(const SparseCountMatrix& m, const fs::path& path) {
  save_csv(m, path, [](Count v) { return std::to_string(v); });
}

void save_matrix_csv(const WeightedAdjacency& m, const fs::path& path) {
  save_csv(m, path, [](double v) { return format_real(v); });
}

SparseCountMatrix load_count_matrix_csv(const fs::path& path) {
  Triplets t = read_triplets(path);
  std::vector<Count> values;
  values.reserve(t.values.size());
  for (const auto& s : t.values) {
    Count v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw LoadError(path.string() + ": '" + s + "' is not a count");
    }
    values.push_back(v);
  }
  try {
    return SparseCountMatrix(t.rows, t.cols, std::move(t.offsets), std::move(t.col_idx), std::move(values));
  } catch (const InputError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

WeightedAdjacency load_weighted_matrix_csv(const fs::path& path) {
  Triplets t = read_triplets(path);
  std::vector<double> values;
  values.reserve(t.values.size());
  for (const auto& s : t.values) values.push_back(parse_real(s, path.string()));
  try {
    return WeightedAdjacency(t.rows, t.cols, std::move(t.offsets), std::move(t.col_idx), std::move(values));
  } catch (const InputError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void save_sweep_csv(const SweepTable& table, const fs::path& path) {
  auto out = open_output(path);
  out << "arch,k,norm,propagation,acc_mean,acc_std,density,failures\n";
  for (const SweepRow& r : table) {
    out << r.arch << ',' << r.k << ',' << r.norm << ',' << r.propagation << ',' << format_real(r.acc_mean)
        << ',' << format_real(r.acc_std) << ',' << format_real(r.density) << ',' << r.failures << '\n';
  }
}

SweepTable load_sweep_csv(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!getline_trimmed(in, line) || line != "arch,k,norm,propagation,acc_mean,acc_std,density,failures") {
    throw LoadError(path.string() + ": missing sweep header");
  }
  SweepTable table;
  std::size_t line_no = 1;
  while (getline_trimmed(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(line_no);
    auto f = split(line, ',');
    if (f.size() != 8) throw LoadError(where + ": expected 8 fields");
    table.push_back(SweepRow{f[0], parse_size(f[1], where), f[2], f[3], parse_real(f[4], where),
                             parse_real(f[5], where), parse_real(f[6], where), parse_size(f[7], where)});
  }
  return table;
}

}  // namespace hopscope

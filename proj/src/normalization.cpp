#include "hopscope/normalization.hpp"

#include <cmath>
#include <vector>

namespace hopscope {

std::string to_string(NormScheme s) {
  switch (s) {
    case NormScheme::none:
      return "none";
    case NormScheme::row:
      return "row";
    case NormScheme::sym:
      return "sym";
    case NormScheme::dir:
      return "dir";
  }
  return "unknown";
}

std::optional<NormScheme> parse_norm_scheme(std::string_view name) {
  if (name == "none") return NormScheme::none;
  if (name == "row") return NormScheme::row;
  if (name == "sym") return NormScheme::sym;
  if (name == "dir") return NormScheme::dir;
  return std::nullopt;
}

namespace {

double inv(double d) { return d > 0.0 ? 1.0 / d : 0.0; }
double inv_sqrt(double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; }

}  // namespace

WeightedAdjacency normalize(const WeightedAdjacency& m, NormScheme scheme) {
  const std::size_t n = m.n_rows();
  std::vector<double> row_sum(n, 0.0), col_sum(m.n_cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto rc = m.row_cols(i);
    auto rv = m.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      row_sum[i] += rv[p];
      col_sum[rc[p]] += rv[p];
    }
  }

  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  std::size_t empty_rows = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto rc = m.row_cols(i);
    auto rv = m.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      const std::size_t j = rc[p];
      double w = rv[p];
      switch (scheme) {
        case NormScheme::none:
          break;
        case NormScheme::row:
          w *= inv(row_sum[i]);
          break;
        case NormScheme::sym:
          w *= inv_sqrt(row_sum[i]) * inv_sqrt(j < n ? row_sum[j] : 0.0);
          break;
        case NormScheme::dir:
          w *= inv_sqrt(row_sum[i]) * inv_sqrt(col_sum[j]);
          break;
      }
      if (w == 0.0) continue;
      cols.push_back(j);
      vals.push_back(w);
    }
    if (cols.size() == offsets.back()) ++empty_rows;
    offsets.push_back(cols.size());
  }
  WeightedAdjacency out(n, m.n_cols(), std::move(offsets), std::move(cols), std::move(vals));
  out.degenerate_rows = empty_rows;
  return out;
}

WeightedAdjacency normalize(const SparseCountMatrix& a, NormScheme scheme) {
  return normalize(as_weighted(a), scheme);
}

WeightedAdjacency gcn_canonical(const SparseCountMatrix& a) {
  return normalize(add_self_loops(a), NormScheme::sym);
}

}  // namespace hopscope

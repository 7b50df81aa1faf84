#include "hopscope/weighted.hpp"

#include <algorithm>
#include <cmath>

#include "hopscope/error.hpp"

namespace hopscope {

WeightedAdjacency::WeightedAdjacency(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<std::size_t> row_offsets,
                                     std::vector<std::size_t> col_indices,
                                     std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != col_indices_.size() || values_.size() != col_indices_.size()) {
    throw InputError("WeightedAdjacency: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (col_indices_[p] >= n_cols_ || (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1])) {
        throw InputError("WeightedAdjacency: columns out of range or unsorted");
      }
      if (!std::isfinite(values_[p])) throw NumericError("WeightedAdjacency: non-finite weight");
    }
  }
}

double WeightedAdjacency::at(std::size_t i, std::size_t j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

WeightedAdjacency as_weighted(const SparseCountMatrix& a) {
  std::vector<double> vals(a.values().begin(), a.values().end());
  return WeightedAdjacency(a.n_rows(), a.n_cols(), {a.row_offsets().begin(), a.row_offsets().end()},
                           {a.col_indices().begin(), a.col_indices().end()}, std::move(vals));
}

WeightedAdjacency transpose(const WeightedAdjacency& a) {
  std::vector<std::size_t> offsets(a.n_cols() + 1, 0);
  for (std::size_t c : a.col_indices()) ++offsets[c + 1];
  for (std::size_t j = 0; j < a.n_cols(); ++j) offsets[j + 1] += offsets[j];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::size_t> cols(a.nnz());
  std::vector<double> vals(a.nnz());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      std::size_t dst = cursor[rc[p]]++;
      cols[dst] = i;
      vals[dst] = rv[p];
    }
  }
  WeightedAdjacency t(a.n_cols(), a.n_rows(), std::move(offsets), std::move(cols), std::move(vals));
  return t;
}

DenseMatrix to_dense(const WeightedAdjacency& a) {
  DenseMatrix m(a.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) m(i, rc[p]) = rv[p];
  }
  return m;
}

DenseMatrix to_dense(const SparseCountMatrix& a) { return to_dense(as_weighted(a)); }

SupportPattern support(const WeightedAdjacency& a) {
  SupportPattern p(a.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t q = 0; q < rc.size(); ++q) {
      if (rv[q] != 0.0) p.set(i, rc[q]);
    }
  }
  return p;
}

bool same_structure(const WeightedAdjacency& a, const WeightedAdjacency& b) {
  return a.n_rows() == b.n_rows() && a.n_cols() == b.n_cols() &&
         std::equal(a.row_offsets().begin(), a.row_offsets().end(), b.row_offsets().begin(),
                    b.row_offsets().end()) &&
         std::equal(a.col_indices().begin(), a.col_indices().end(), b.col_indices().begin(),
                    b.col_indices().end());
}

}  // namespace hopscope

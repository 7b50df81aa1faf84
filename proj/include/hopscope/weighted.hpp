#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hopscope/dense.hpp"
#include "hopscope/graph.hpp"
#include "hopscope/support_pattern.hpp"

namespace hopscope {

// CSR matrix with real weights: a normalized adjacency, or the real-valued
// image of a count matrix. Values must be finite.
class WeightedAdjacency {
 public:
  WeightedAdjacency() = default;
  WeightedAdjacency(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
                    std::vector<std::size_t> col_indices, std::vector<double> values);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return col_indices_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const noexcept {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const double> row_values(std::size_t i) const noexcept {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  double at(std::size_t i, std::size_t j) const;

  // Rows left without any entry because a degree factor was zero.
  std::size_t degenerate_rows = 0;

  friend bool operator==(const WeightedAdjacency&, const WeightedAdjacency&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

WeightedAdjacency as_weighted(const SparseCountMatrix& a);
WeightedAdjacency transpose(const WeightedAdjacency& a);
DenseMatrix to_dense(const WeightedAdjacency& a);
DenseMatrix to_dense(const SparseCountMatrix& a);
SupportPattern support(const WeightedAdjacency& a);
// Same shape, offsets and column indices; values are not compared.
bool same_structure(const WeightedAdjacency& a, const WeightedAdjacency& b);

}  // namespace hopscope

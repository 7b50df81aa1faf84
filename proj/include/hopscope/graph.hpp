#pragma once

// Directed (multi)graphs as CSR adjacency matrices over the non-negative
// integers. Entry (i, j) is the number of parallel edges i -> j, so powers of
// the matrix count walks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hopscope {

using Count = std::uint64_t;
using Edge = std::pair<std::size_t, std::size_t>;

class SparseCountMatrix {
 public:
  SparseCountMatrix() = default;

  // Validates the CSR invariants: offsets of length n_rows + 1, strictly
  // increasing columns within a row, no stored zeros. Throws InputError.
  SparseCountMatrix(std::size_t n_rows, std::size_t n_cols,
                    std::vector<std::size_t> row_offsets,
                    std::vector<std::size_t> col_indices,
                    std::vector<Count> values);

  static SparseCountMatrix zeros(std::size_t n_rows, std::size_t n_cols);
  static SparseCountMatrix identity(std::size_t n);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return col_indices_.size(); }
  bool is_square() const noexcept { return n_rows_ == n_cols_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const Count> values() const noexcept { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const noexcept {
    return {col_indices_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }
  std::span<const Count> row_values(std::size_t i) const noexcept {
    return {values_.data() + row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]};
  }

  // Binary search within row i; 0 when absent.
  Count at(std::size_t i, std::size_t j) const;

  // Sum of all stored values (edge mass, multiplicity included).
  Count total_mass() const;

  bool empty_pattern() const noexcept { return col_indices_.empty(); }

  friend bool operator==(const SparseCountMatrix&, const SparseCountMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<Count> values_;
};

enum class DegreeKind { in, out };

struct DegreeVector {
  DegreeKind kind;
  std::vector<Count> values;
};

struct GraphMeta {
  std::size_t n_nodes = 0;
  bool has_self_loops = false;
  bool is_symmetric = false;
};

// Duplicate edges accumulate into the entry value.
SparseCountMatrix from_edge_list(std::span<const Edge> edges, std::size_t n_nodes);

// A + I. Additive: an existing loop of multiplicity m becomes m + 1.
SparseCountMatrix add_self_loops(const SparseCountMatrix& a);

SparseCountMatrix transpose(const SparseCountMatrix& a);

// A + A^T.
SparseCountMatrix symmetrize(const SparseCountMatrix& a);

// Entry-wise sum of two same-shape matrices, overflow-checked.
SparseCountMatrix add(const SparseCountMatrix& a, const SparseCountMatrix& b);

// Multiplies every value by s, overflow-checked. s == 0 gives the zero matrix.
SparseCountMatrix scale(const SparseCountMatrix& a, Count s);

// All values replaced by 1.
SparseCountMatrix deduplicate(const SparseCountMatrix& a);

// out = row sums, in = column sums.
DegreeVector degrees(const SparseCountMatrix& a, DegreeKind kind);

GraphMeta meta(const SparseCountMatrix& a);

bool has_full_diagonal(const SparseCountMatrix& a);
bool has_symmetric_support(const SparseCountMatrix& a);

std::vector<Edge> to_edge_list(const SparseCountMatrix& a);

}  // namespace hopscope

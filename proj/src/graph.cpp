#include "hopscope/graph.hpp"

#include <algorithm>
#include <string>

#include "hopscope/error.hpp"

namespace hopscope {

namespace {

Count checked_add(Count a, Count b) {
  Count r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw OverflowError("path count exceeds 64-bit range");
  }
  return r;
}

// Builds CSR from per-row (col, value) lists; columns must be sorted & unique.
SparseCountMatrix assemble(std::size_t n_rows, std::size_t n_cols,
                           const std::vector<std::vector<std::pair<std::size_t, Count>>>& rows) {
  std::vector<std::size_t> offsets(n_rows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Count> vals;
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (auto [c, v] : rows[i]) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets[i + 1] = cols.size();
  }
  return SparseCountMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
}

}  // namespace

SparseCountMatrix::SparseCountMatrix(std::size_t n_rows, std::size_t n_cols,
                                     std::vector<std::size_t> row_offsets,
                                     std::vector<std::size_t> col_indices,
                                     std::vector<Count> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != n_rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != col_indices_.size()) {
    throw InputError("CSR row_offsets inconsistent with shape");
  }
  if (values_.size() != col_indices_.size()) {
    throw InputError("CSR values and col_indices differ in length");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) {
      throw InputError("CSR row_offsets must be non-decreasing");
    }
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (col_indices_[p] >= n_cols_) throw InputError("CSR column index out of range");
      if (p > row_offsets_[i] && col_indices_[p] <= col_indices_[p - 1]) {
        throw InputError("CSR columns must be strictly increasing within a row");
      }
      if (values_[p] == 0) throw InputError("CSR stores an explicit zero");
    }
  }
}

SparseCountMatrix SparseCountMatrix::zeros(std::size_t n_rows, std::size_t n_cols) {
  return SparseCountMatrix(n_rows, n_cols, std::vector<std::size_t>(n_rows + 1, 0), {}, {});
}

SparseCountMatrix SparseCountMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1), cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = i;
  }
  return SparseCountMatrix(n, n, std::move(offsets), std::move(cols), std::vector<Count>(n, 1));
}

Count SparseCountMatrix::at(std::size_t i, std::size_t j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

Count SparseCountMatrix::total_mass() const {
  Count total = 0;
  for (Count v : values_) total = checked_add(total, v);
  return total;
}

SparseCountMatrix from_edge_list(std::span<const Edge> edges, std::size_t n_nodes) {
  std::vector<Edge> sorted(edges.begin(), edges.end());
  for (const auto& [s, d] : sorted) {
    if (s >= n_nodes || d >= n_nodes) {
      throw InputError("edge (" + std::to_string(s) + "," + std::to_string(d) +
                       ") has an endpoint >= n_nodes=" + std::to_string(n_nodes));
    }
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> offsets(n_nodes + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<Count> vals;
  for (std::size_t p = 0; p < sorted.size(); ++p) {
    if (p > 0 && sorted[p] == sorted[p - 1]) {
      ++vals.back();
      continue;
    }
    cols.push_back(sorted[p].second);
    vals.push_back(1);
    ++offsets[sorted[p].first + 1];
  }
  for (std::size_t i = 0; i < n_nodes; ++i) offsets[i + 1] += offsets[i];
  return SparseCountMatrix(n_nodes, n_nodes, std::move(offsets), std::move(cols), std::move(vals));
}

SparseCountMatrix add(const SparseCountMatrix& a, const SparseCountMatrix& b) {
  if (a.n_rows() != b.n_rows() || a.n_cols() != b.n_cols()) {
    throw InputError("add: shape mismatch");
  }
  std::vector<std::vector<std::pair<std::size_t, Count>>> rows(a.n_rows());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto ac = a.row_cols(i), bc = b.row_cols(i);
    auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        rows[i].emplace_back(ac[p], av[p]);
        ++p;
      } else if (p == ac.size() || bc[q] < ac[p]) {
        rows[i].emplace_back(bc[q], bv[q]);
        ++q;
      } else {
        rows[i].emplace_back(ac[p], checked_add(av[p], bv[q]));
        ++p;
        ++q;
      }
    }
  }
  return assemble(a.n_rows(), a.n_cols(), rows);
}

SparseCountMatrix scale(const SparseCountMatrix& a, Count s) {
  if (s == 0) return SparseCountMatrix::zeros(a.n_rows(), a.n_cols());
  std::vector<Count> vals(a.values().begin(), a.values().end());
  for (Count& v : vals) {
    if (__builtin_mul_overflow(v, s, &v)) throw OverflowError("path count exceeds 64-bit range");
  }
  return SparseCountMatrix(a.n_rows(), a.n_cols(),
                           {a.row_offsets().begin(), a.row_offsets().end()},
                           {a.col_indices().begin(), a.col_indices().end()}, std::move(vals));
}

SparseCountMatrix add_self_loops(const SparseCountMatrix& a) {
  if (!a.is_square()) throw InputError("add_self_loops: matrix is not square");
  return add(a, SparseCountMatrix::identity(a.n_rows()));
}

SparseCountMatrix transpose(const SparseCountMatrix& a) {
  std::vector<std::size_t> offsets(a.n_cols() + 1, 0);
  for (std::size_t c : a.col_indices()) ++offsets[c + 1];
  for (std::size_t j = 0; j < a.n_cols(); ++j) offsets[j + 1] += offsets[j];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<std::size_t> cols(a.nnz());
  std::vector<Count> vals(a.nnz());
  // Row-major scan keeps columns of the transpose sorted.
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      std::size_t dst = cursor[rc[p]]++;
      cols[dst] = i;
      vals[dst] = rv[p];
    }
  }
  return SparseCountMatrix(a.n_cols(), a.n_rows(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseCountMatrix symmetrize(const SparseCountMatrix& a) {
  if (!a.is_square()) throw InputError("symmetrize: matrix is not square");
  return add(a, transpose(a));
}

SparseCountMatrix deduplicate(const SparseCountMatrix& a) {
  return SparseCountMatrix(a.n_rows(), a.n_cols(),
                           {a.row_offsets().begin(), a.row_offsets().end()},
                           {a.col_indices().begin(), a.col_indices().end()},
                           std::vector<Count>(a.nnz(), 1));
}

DegreeVector degrees(const SparseCountMatrix& a, DegreeKind kind) {
  if (!a.is_square()) throw InputError("degrees: matrix is not square");
  DegreeVector d{kind, std::vector<Count>(a.n_rows(), 0)};
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      Count& slot = kind == DegreeKind::out ? d.values[i] : d.values[rc[p]];
      slot = checked_add(slot, rv[p]);
    }
  }
  return d;
}

bool has_full_diagonal(const SparseCountMatrix& a) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    if (a.at(i, i) == 0) return false;
  }
  return true;
}

bool has_symmetric_support(const SparseCountMatrix& a) {
  if (!a.is_square()) return false;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t j : a.row_cols(i)) {
      if (a.at(j, i) == 0) return false;
    }
  }
  return true;
}

GraphMeta meta(const SparseCountMatrix& a) {
  GraphMeta m;
  m.n_nodes = a.n_rows();
  for (std::size_t i = 0; i < a.n_rows() && i < a.n_cols(); ++i) {
    if (a.at(i, i) != 0) {
      m.has_self_loops = true;
      break;
    }
  }
  m.is_symmetric = a.is_square() && a == transpose(a);
  return m;
}

std::vector<Edge> to_edge_list(const SparseCountMatrix& a) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t p = 0; p < rc.size(); ++p) {
      for (Count m = 0; m < rv[p]; ++m) edges.emplace_back(i, rc[p]);
    }
  }
  return edges;
}

}  // namespace hopscope

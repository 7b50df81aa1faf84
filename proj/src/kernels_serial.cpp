#include <map>

#include "hopscope/error.hpp"
#include "hopscope/kernels.hpp"

namespace hopscope::kernels::serial {

SparseCountMatrix spgemm_count(const SparseCountMatrix& a, const SparseCountMatrix& b) {
  if (a.n_cols() != b.n_rows()) throw InputError("spgemm_count: inner dimensions differ");
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  std::vector<Count> vals;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    std::map<std::size_t, Count> row;
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      auto bc = b.row_cols(ac[p]);
      auto bv = b.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) {
        Count prod;
        if (__builtin_mul_overflow(av[p], bv[q], &prod) ||
            __builtin_add_overflow(row[bc[q]], prod, &row[bc[q]])) {
          throw OverflowError("path count exceeds 64-bit range");
        }
      }
    }
    for (auto [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets.push_back(cols.size());
  }
  return SparseCountMatrix(a.n_rows(), b.n_cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SupportPattern spgemm_support(const SupportPattern& p, const SparseCountMatrix& a) {
  if (p.n_cols() != a.n_rows()) throw InputError("spgemm_support: inner dimensions differ");
  SupportPattern r(p.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    for (std::size_t j = 0; j < p.n_cols(); ++j) {
      if (!p.test(i, j)) continue;
      for (std::size_t c : a.row_cols(j)) r.set(i, c);
    }
  }
  return r;
}

WeightedAdjacency spgemm_real(const WeightedAdjacency& a, const WeightedAdjacency& b) {
  if (a.n_cols() != b.n_rows()) throw InputError("spgemm_real: inner dimensions differ");
  std::vector<std::size_t> offsets{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    std::map<std::size_t, double> row;
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      auto bc = b.row_cols(ac[p]);
      auto bv = b.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) row[bc[q]] += av[p] * bv[q];
    }
    for (auto [c, v] : row) {
      cols.push_back(c);
      vals.push_back(v);
    }
    offsets.push_back(cols.size());
  }
  return WeightedAdjacency(a.n_rows(), b.n_cols(), std::move(offsets), std::move(cols), std::move(vals));
}

DenseMatrix spmm(const WeightedAdjacency& a, const DenseMatrix& h) {
  if (a.n_cols() != h.rows()) throw InputError("spmm: inner dimensions differ");
  DenseMatrix out(a.n_rows(), h.cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      for (std::size_t j = 0; j < h.cols(); ++j) out(i, j) += av[p] * h(ac[p], j);
    }
  }
  return out;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InputError("gemm: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw InputError("gemm_tn: inner dimensions differ");
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw InputError("gemm_nt: inner dimensions differ");
  DenseMatrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace hopscope::kernels::serial

#include <algorithm>
#include <atomic>
#include <utility>

#include "hopscope/error.hpp"
#include "hopscope/kernels.hpp"

namespace hopscope::kernels {

namespace {

template <typename V>
struct RowBuffers {
  std::vector<std::vector<std::size_t>> cols;
  std::vector<std::vector<V>> vals;
  explicit RowBuffers(std::size_t n) : cols(n), vals(n) {}
};

template <typename V>
std::pair<std::vector<std::size_t>, std::pair<std::vector<std::size_t>, std::vector<V>>> concat(
    RowBuffers<V>& rows) {
  const std::size_t n = rows.cols.size();
  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + rows.cols[i].size();
  std::vector<std::size_t> cols(offsets[n]);
  std::vector<V> vals(offsets[n]);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(rows.cols[i].begin(), rows.cols[i].end(), cols.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
    std::copy(rows.vals[i].begin(), rows.vals[i].end(), vals.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
  }
  return {std::move(offsets), {std::move(cols), std::move(vals)}};
}

// Gustavson row product with a dense accumulator and a touched-column list.
// Accumulation order per output entry follows (p, q) ascending, matching the
// serial reference.
template <typename V, typename MatA, typename MatB, typename Combine>
void gustavson_rows(const MatA& a, const MatB& b, RowBuffers<V>& out, Combine&& combine) {
  const auto n_rows = static_cast<std::ptrdiff_t>(a.n_rows());
#pragma omp parallel
  {
    std::vector<V> acc(b.n_cols(), V{});
    std::vector<char> seen(b.n_cols(), 0);
    std::vector<std::size_t> touched;
#pragma omp for schedule(dynamic, 32)
    for (std::ptrdiff_t si = 0; si < n_rows; ++si) {
      const auto i = static_cast<std::size_t>(si);
      touched.clear();
      auto ac = a.row_cols(i);
      auto av = a.row_values(i);
      for (std::size_t p = 0; p < ac.size(); ++p) {
        auto bc = b.row_cols(ac[p]);
        auto bv = b.row_values(ac[p]);
        for (std::size_t q = 0; q < bc.size(); ++q) {
          const std::size_t c = bc[q];
          if (!seen[c]) {
            seen[c] = 1;
            touched.push_back(c);
          }
          combine(acc[c], av[p], bv[q]);
        }
      }
      std::sort(touched.begin(), touched.end());
      out.cols[i] = touched;
      out.vals[i].resize(touched.size());
      for (std::size_t t = 0; t < touched.size(); ++t) {
        out.vals[i][t] = acc[touched[t]];
        acc[touched[t]] = V{};
        seen[touched[t]] = 0;
      }
    }
  }
}

}  // namespace

SparseCountMatrix spgemm_count(const SparseCountMatrix& a, const SparseCountMatrix& b) {
  if (a.n_cols() != b.n_rows()) throw InputError("spgemm_count: inner dimensions differ");
  RowBuffers<Count> rows(a.n_rows());
  std::atomic<bool> overflow{false};
  gustavson_rows<Count>(a, b, rows, [&overflow](Count& acc, Count x, Count y) {
    Count prod;
    if (__builtin_mul_overflow(x, y, &prod) || __builtin_add_overflow(acc, prod, &acc)) {
      overflow.store(true, std::memory_order_relaxed);
    }
  });
  if (overflow.load()) throw OverflowError("path count exceeds 64-bit range");
  auto [offsets, cv] = concat(rows);
  return SparseCountMatrix(a.n_rows(), b.n_cols(), std::move(offsets), std::move(cv.first),
                           std::move(cv.second));
}

SupportPattern spgemm_support(const SupportPattern& p, const SparseCountMatrix& a) {
  if (p.n_cols() != a.n_rows()) throw InputError("spgemm_support: inner dimensions differ");
  SupportPattern r(p.n_rows(), a.n_cols());
  const auto n_rows = static_cast<std::ptrdiff_t>(p.n_rows());
#pragma omp parallel for schedule(dynamic, 32)
  for (std::ptrdiff_t si = 0; si < n_rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    auto out = r.row_words(i);
    p.for_each_in_row(i, [&](std::size_t j) {
      for (std::size_t c : a.row_cols(j)) out[c / 64] |= std::uint64_t{1} << (c % 64);
    });
  }
  return r;
}

WeightedAdjacency spgemm_real(const WeightedAdjacency& a, const WeightedAdjacency& b) {
  if (a.n_cols() != b.n_rows()) throw InputError("spgemm_real: inner dimensions differ");
  RowBuffers<double> rows(a.n_rows());
  gustavson_rows<double>(a, b, rows, [](double& acc, double x, double y) { acc += x * y; });
  auto [offsets, cv] = concat(rows);
  return WeightedAdjacency(a.n_rows(), b.n_cols(), std::move(offsets), std::move(cv.first),
                           std::move(cv.second));
}

DenseMatrix spmm(const WeightedAdjacency& a, const DenseMatrix& h) {
  if (a.n_cols() != h.rows()) throw InputError("spmm: inner dimensions differ");
  DenseMatrix out(a.n_rows(), h.cols());
  const auto n_rows = static_cast<std::ptrdiff_t>(a.n_rows());
  const std::size_t width = h.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n_rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    double* dst = out.row(i).data();
    auto ac = a.row_cols(i);
    auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const double w = av[p];
      const double* src = h.row(ac[p]).data();
      for (std::size_t j = 0; j < width; ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw InputError("gemm: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  const auto n_rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t inner = a.cols(), width = b.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n_rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    double* dst = c.row(i).data();
    const double* ai = a.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double x = ai[k];
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < width; ++j) dst[j] += x * bk[j];
    }
  }
  return c;
}

DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw InputError("gemm_tn: inner dimensions differ");
  DenseMatrix c(a.cols(), b.cols());
  const auto n_out = static_cast<std::ptrdiff_t>(a.cols());
  const std::size_t inner = a.rows(), width = b.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n_out; ++si) {
    const auto i = static_cast<std::size_t>(si);
    double* dst = c.row(i).data();
    for (std::size_t k = 0; k < inner; ++k) {
      const double x = a(k, i);
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < width; ++j) dst[j] += x * bk[j];
    }
  }
  return c;
}

DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw InputError("gemm_nt: inner dimensions differ");
  DenseMatrix c(a.rows(), b.rows());
  const auto n_rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t inner = a.cols(), width = b.rows();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < n_rows; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const double* ai = a.row(i).data();
    for (std::size_t j = 0; j < width; ++j) {
      const double* bj = b.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += ai[k] * bj[k];
      c(i, j) = s;
    }
  }
  return c;
}

}  // namespace hopscope::kernels

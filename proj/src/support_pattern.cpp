#include "hopscope/support_pattern.hpp"

#include "hopscope/error.hpp"

namespace hopscope {

namespace {

void require_same_shape(const SupportPattern& p, const SupportPattern& q, const char* op) {
  if (p.n_rows() != q.n_rows() || p.n_cols() != q.n_cols()) {
    throw InputError(std::string(op) + ": pattern shape mismatch");
  }
}

}  // namespace

SupportPattern SupportPattern::identity(std::size_t n) {
  SupportPattern p(n, n);
  for (std::size_t i = 0; i < n; ++i) p.set(i, i);
  return p;
}

std::size_t SupportPattern::count() const noexcept {
  std::size_t c = 0;
  for (std::uint64_t w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

std::size_t SupportPattern::row_count(std::size_t i) const noexcept {
  std::size_t c = 0;
  for (std::uint64_t w : row_words(i)) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

SupportPattern support(const SparseCountMatrix& a) {
  SupportPattern p(a.n_rows(), a.n_cols());
  for (std::size_t i = 0; i < a.n_rows(); ++i) {
    for (std::size_t j : a.row_cols(i)) p.set(i, j);
  }
  return p;
}

bool support_subset(const SupportPattern& p, const SupportPattern& q) {
  require_same_shape(p, q, "support_subset");
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    auto pw = p.row_words(i);
    auto qw = q.row_words(i);
    for (std::size_t w = 0; w < pw.size(); ++w) {
      if (pw[w] & ~qw[w]) return false;
    }
  }
  return true;
}

bool support_equal(const SupportPattern& p, const SupportPattern& q) {
  require_same_shape(p, q, "support_equal");
  return p == q;
}

SupportPattern pattern_or(const SupportPattern& p, const SupportPattern& q) {
  require_same_shape(p, q, "pattern_or");
  SupportPattern r = p;
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    auto rw = r.row_words(i);
    auto qw = q.row_words(i);
    for (std::size_t w = 0; w < rw.size(); ++w) rw[w] |= qw[w];
  }
  return r;
}

SupportPattern mask_columns(const SupportPattern& p, const std::vector<bool>& keep, bool invert) {
  if (keep.size() != p.n_cols()) throw InputError("mask_columns: mask length mismatch");
  std::vector<std::uint64_t> mask(p.words_per_row(), 0);
  for (std::size_t j = 0; j < keep.size(); ++j) {
    if (keep[j] != invert) mask[j / 64] |= std::uint64_t{1} << (j % 64);
  }
  SupportPattern r = p;
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    auto rw = r.row_words(i);
    for (std::size_t w = 0; w < rw.size(); ++w) rw[w] &= mask[w];
  }
  return r;
}

bool first_difference(const SupportPattern& p, const SupportPattern& q, std::size_t& i, std::size_t& j) {
  require_same_shape(p, q, "first_difference");
  for (std::size_t r = 0; r < p.n_rows(); ++r) {
    auto pw = p.row_words(r);
    auto qw = q.row_words(r);
    for (std::size_t w = 0; w < pw.size(); ++w) {
      if (std::uint64_t d = pw[w] & ~qw[w]) {
        i = r;
        j = w * 64 + static_cast<std::size_t>(__builtin_ctzll(d));
        return true;
      }
    }
  }
  return false;
}

double density(const SupportPattern& p) {
  if (p.n_rows() == 0 || p.n_cols() == 0) return 0.0;
  return static_cast<double>(p.count()) /
         (static_cast<double>(p.n_rows()) * static_cast<double>(p.n_cols()));
}

double density(const SparseCountMatrix& a) {
  if (a.n_rows() == 0 || a.n_cols() == 0) return 0.0;
  return static_cast<double>(a.nnz()) /
         (static_cast<double>(a.n_rows()) * static_cast<double>(a.n_cols()));
}

}  // namespace hopscope

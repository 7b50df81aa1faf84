#pragma once

// Boolean connectivity pattern of a matrix: bit (i, j) is set iff entry
// (i, j) is non-zero. Two matrices with equal patterns are "connectivity
// equal".

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hopscope/graph.hpp"

namespace hopscope {

class SupportPattern {
 public:
  SupportPattern() = default;
  SupportPattern(std::size_t n_rows, std::size_t n_cols)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        words_per_row_((n_cols + 63) / 64),
        bits_(n_rows * words_per_row_, 0) {}

  static SupportPattern identity(std::size_t n);

  std::size_t n_rows() const noexcept { return n_rows_; }
  std::size_t n_cols() const noexcept { return n_cols_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  bool test(std::size_t i, std::size_t j) const noexcept {
    return (bits_[i * words_per_row_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j) noexcept {
    bits_[i * words_per_row_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }

  std::span<std::uint64_t> row_words(std::size_t i) noexcept {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> row_words(std::size_t i) const noexcept {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }

  std::size_t count() const noexcept;
  std::size_t row_count(std::size_t i) const noexcept;
  bool none() const noexcept { return count() == 0; }

  // Calls f(j) for every set bit of row i, in increasing j.
  template <typename F>
  void for_each_in_row(std::size_t i, F&& f) const {
    auto words = row_words(i);
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t bits = words[w];
      while (bits) {
        f(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const SupportPattern&, const SupportPattern&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

SupportPattern support(const SparseCountMatrix& a);

// Set relations on bit positions. Throw InputError on shape mismatch.
bool support_subset(const SupportPattern& p, const SupportPattern& q);
bool support_equal(const SupportPattern& p, const SupportPattern& q);

SupportPattern pattern_or(const SupportPattern& p, const SupportPattern& q);

// Keeps only columns j with keep[j] (or !keep[j] when invert).
SupportPattern mask_columns(const SupportPattern& p, const std::vector<bool>& keep, bool invert = false);

// First (i, j) set in p but not in q, scanning row-major.
bool first_difference(const SupportPattern& p, const SupportPattern& q, std::size_t& i, std::size_t& j);

// Non-zero count divided by n_rows * n_cols.
double density(const SupportPattern& p);
double density(const SparseCountMatrix& a);

}  // namespace hopscope

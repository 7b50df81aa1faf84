#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hopscope {

// Malformed arguments, shape mismatches, out-of-range node ids.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact integer path counts no longer fit in 64 bits.
class OverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A lemma was asked about a graph that does not meet its hypothesis.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values in a forward pass or loss.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, long epoch = -1)
      : std::runtime_error(what), epoch_(epoch) {}
  long epoch() const noexcept { return epoch_; }

 private:
  long epoch_;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hopscope

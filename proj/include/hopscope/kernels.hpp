#pragma once

// Matrix products used by the hop algebra and the message-passing models.
//
// hopscope::kernels holds the OpenMP row-parallel versions. Each output row
// is produced by one thread with the same accumulation order as the serial
// reference in hopscope::kernels::serial, so both return bit-identical
// results for any thread count. The serial versions are deliberately plain
// and exist for testing and benchmarking.

#include "hopscope/dense.hpp"
#include "hopscope/graph.hpp"
#include "hopscope/support_pattern.hpp"
#include "hopscope/weighted.hpp"

namespace hopscope::kernels {

// Integer product; throws OverflowError if any entry exceeds 64 bits.
SparseCountMatrix spgemm_count(const SparseCountMatrix& a, const SparseCountMatrix& b);

// Boolean product support(P) * support(A).
SupportPattern spgemm_support(const SupportPattern& p, const SparseCountMatrix& a);

WeightedAdjacency spgemm_real(const WeightedAdjacency& a, const WeightedAdjacency& b);

// Sparse times dense.
DenseMatrix spmm(const WeightedAdjacency& a, const DenseMatrix& h);

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);     // A * B
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);  // A^T * B
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);  // A * B^T

namespace serial {

SparseCountMatrix spgemm_count(const SparseCountMatrix& a, const SparseCountMatrix& b);
SupportPattern spgemm_support(const SupportPattern& p, const SparseCountMatrix& a);
WeightedAdjacency spgemm_real(const WeightedAdjacency& a, const WeightedAdjacency& b);
DenseMatrix spmm(const WeightedAdjacency& a, const DenseMatrix& h);
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix gemm_nt(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace serial

}  // namespace hopscope::kernels

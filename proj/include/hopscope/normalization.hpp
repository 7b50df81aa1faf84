#pragma once

// Edge reweightings applied to an aggregation matrix M (row i aggregates
// over the columns j it stores). With r = row sums and c = column sums of M:
//   none  w_ij = M_ij
//   row   w_ij = M_ij / r_i                  (mean aggregation)
//   sym   w_ij = M_ij / sqrt(r_i r_j)
//   dir   w_ij = M_ij / sqrt(r_i c_j)        (receiver in-count, sender out-count)
// A zero degree makes its factor 0; entries that become 0 are dropped.

#include <optional>
#include <string>
#include <string_view>

#include "hopscope/graph.hpp"
#include "hopscope/weighted.hpp"

namespace hopscope {

enum class NormScheme { none, row, sym, dir };

std::string to_string(NormScheme s);
std::optional<NormScheme> parse_norm_scheme(std::string_view name);

// Degrees are taken from the matrix passed in, so a power or a self-looped
// matrix is normalized by its own sums. Empty rows of the result are counted
// in degenerate_rows.
WeightedAdjacency normalize(const WeightedAdjacency& m, NormScheme scheme);
WeightedAdjacency normalize(const SparseCountMatrix& a, NormScheme scheme);

// D~^{-1/2} (A + I) D~^{-1/2} with D~ the degrees of A + I.
WeightedAdjacency gcn_canonical(const SparseCountMatrix& a);

}  // namespace hopscope

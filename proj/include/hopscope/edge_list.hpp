#pragma once

// Edge-list text format:
//   # comment lines are ignored
//   %nodes N        optional header fixing the node count
//   src<TAB>dst     one edge per line, dense integer ids
// Without a header the node count is max id + 1.

#include <filesystem>
#include <iosfwd>

#include "hopscope/graph.hpp"

namespace hopscope {

SparseCountMatrix read_edge_list(std::istream& in);
SparseCountMatrix read_edge_list(const std::filesystem::path& path);

// Writes the header and one line per unit of multiplicity.
void write_edge_list(std::ostream& out, const SparseCountMatrix& a);
void write_edge_list(const std::filesystem::path& path, const SparseCountMatrix& a);

}  // namespace hopscope

#include "hopscope/edge_list.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hopscope/error.hpp"

namespace hopscope {

namespace {

std::size_t parse_index(const std::string& token, std::size_t line_no) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError("line " + std::to_string(line_no) + ": '" + token +
                     "' is not a non-negative integer node id");
  }
  return value;
}

}  // namespace

SparseCountMatrix read_edge_list(std::istream& in) {
  std::optional<std::size_t> declared_nodes;
  std::vector<Edge> edges;
  std::size_t max_id_plus_one = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first[0] == '#') continue;
    if (first == "%nodes") {
      std::string count;
      if (!(fields >> count)) {
        throw InputError("line " + std::to_string(line_no) + ": %nodes needs a count");
      }
      declared_nodes = parse_index(count, line_no);
      continue;
    }
    std::string second, extra;
    if (!(fields >> second) || (fields >> extra)) {
      throw InputError("line " + std::to_string(line_no) + ": expected 'src<TAB>dst'");
    }
    Edge e{parse_index(first, line_no), parse_index(second, line_no)};
    max_id_plus_one = std::max({max_id_plus_one, e.first + 1, e.second + 1});
    edges.push_back(e);
  }
  std::size_t n = declared_nodes.value_or(max_id_plus_one);
  if (max_id_plus_one > n) {
    throw InputError("edge endpoint exceeds declared %nodes " + std::to_string(n));
  }
  return from_edge_list(edges, n);
}

SparseCountMatrix read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const SparseCountMatrix& a) {
  out << "%nodes " << a.n_rows() << '\n';
  for (const auto& [s, d] : to_edge_list(a)) out << s << '\t' << d << '\n';
}

void write_edge_list(const std::filesystem::path& path, const SparseCountMatrix& a) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write edge list " + path.string());
  write_edge_list(out, a);
}

}  // namespace hopscope

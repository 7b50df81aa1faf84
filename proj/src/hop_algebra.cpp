#include "hopscope/hop_algebra.hpp"

#include <functional>
#include <unordered_map>

#include "hopscope/error.hpp"
#include "hopscope/kernels.hpp"

namespace hopscope {

namespace {

void require_square(const SparseCountMatrix& a, const char* op) {
  if (!a.is_square()) throw InputError(std::string(op) + ": matrix is not square");
}

// T_1..T_k_max where T_t marks pairs joined by a length-t walk that has
// visited the cycle. Walk state is (current node, visited-yet); U tracks the
// walks that have not visited it.
std::vector<SupportPattern> cycle_touching_upto(const SparseCountMatrix& a,
                                                const std::vector<bool>& on_cycle,
                                                std::size_t k_max) {
  const std::size_t n = a.n_rows();
  SupportPattern untouched(n, n), touched(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (on_cycle[i]) {
      touched.set(i, i);
    } else {
      untouched.set(i, i);
    }
  }
  std::vector<SupportPattern> out;
  out.reserve(k_max);
  for (std::size_t t = 1; t <= k_max; ++t) {
    SupportPattern step_u = kernels::spgemm_support(untouched, a);
    SupportPattern step_t = kernels::spgemm_support(touched, a);
    touched = pattern_or(step_t, mask_columns(step_u, on_cycle));
    untouched = mask_columns(step_u, on_cycle, /*invert=*/true);
    out.push_back(touched);
  }
  return out;
}

std::uint64_t pattern_hash(const SupportPattern& p) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < p.n_rows(); ++i) {
    for (std::uint64_t w : p.row_words(i)) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
  }
  return h;
}

}  // namespace

std::string to_string(LoopLemma lemma) {
  switch (lemma) {
    case LoopLemma::self_loop:
      return "self_loop";
    case LoopLemma::two_node:
      return "two_node";
    case LoopLemma::m_node:
      return "m_node";
  }
  return "unknown";
}

SparseCountMatrix mat_power_count(const SparseCountMatrix& a, std::size_t k) {
  require_square(a, "mat_power_count");
  if (k == 0) return SparseCountMatrix::identity(a.n_rows());
  SparseCountMatrix p = a;
  for (std::size_t j = 2; j <= k && !p.empty_pattern(); ++j) p = kernels::spgemm_count(p, a);
  return p;
}

SupportPattern mat_power_support(const SparseCountMatrix& a, std::size_t k) {
  require_square(a, "mat_power_support");
  SupportPattern p = SupportPattern::identity(a.n_rows());
  for (std::size_t j = 1; j <= k; ++j) p = kernels::spgemm_support(p, a);
  return p;
}

std::vector<SupportPattern> support_powers(const SparseCountMatrix& a, std::size_t k_max) {
  require_square(a, "support_powers");
  std::vector<SupportPattern> powers;
  powers.reserve(k_max + 1);
  powers.push_back(SupportPattern::identity(a.n_rows()));
  for (std::size_t j = 1; j <= k_max; ++j) powers.push_back(kernels::spgemm_support(powers.back(), a));
  return powers;
}

SupportPattern cycle_touching_walks(const SparseCountMatrix& a, const std::vector<bool>& on_cycle,
                                    std::size_t k) {
  require_square(a, "cycle_touching_walks");
  if (on_cycle.size() != a.n_rows()) throw InputError("cycle_touching_walks: mask length mismatch");
  if (k == 0) {
    SupportPattern p(a.n_rows(), a.n_rows());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
      if (on_cycle[i]) p.set(i, i);
    }
    return p;
  }
  return cycle_touching_upto(a, on_cycle, k).back();
}

bool is_directed_cycle(const SparseCountMatrix& a, const std::vector<std::size_t>& cycle) {
  if (cycle.empty()) return false;
  std::vector<bool> seen(a.n_rows(), false);
  for (std::size_t v : cycle) {
    if (v >= a.n_rows() || seen[v]) return false;
    seen[v] = true;
  }
  for (std::size_t t = 0; t < cycle.size(); ++t) {
    if (a.at(cycle[t], cycle[(t + 1) % cycle.size()]) == 0) return false;
  }
  return true;
}

std::optional<std::vector<std::size_t>> find_directed_cycle(const SparseCountMatrix& a, std::size_t m) {
  require_square(a, "find_directed_cycle");
  if (m == 0) return std::nullopt;
  const std::size_t n = a.n_rows();
  std::vector<std::size_t> path;
  std::vector<bool> on_path(n, false);
  // Canonical form: the cycle's smallest node comes first.
  std::function<bool(std::size_t)> extend = [&](std::size_t start) -> bool {
    const std::size_t last = path.back();
    if (path.size() == m) return a.at(last, start) != 0;
    for (std::size_t v : a.row_cols(last)) {
      if (v <= start || on_path[v]) continue;
      path.push_back(v);
      on_path[v] = true;
      if (extend(start)) return true;
      on_path[v] = false;
      path.pop_back();
    }
    return false;
  };
  for (std::size_t s = 0; s < n; ++s) {
    path.assign(1, s);
    on_path[s] = true;
    if (extend(s)) return path;
    on_path[s] = false;
  }
  return std::nullopt;
}

LoopLemmaReport verify_loop_lemma(const SparseCountMatrix& a, LoopLemma lemma, std::size_t k_max,
                                  std::size_t m, std::vector<std::size_t> cycle) {
  require_square(a, "verify_loop_lemma");
  LoopLemmaReport report;
  report.lemma = lemma;
  switch (lemma) {
    case LoopLemma::self_loop:
      if (!has_full_diagonal(a)) {
        throw HypothesisError("self_loop lemma needs a self-loop on every node");
      }
      report.shift = 1;
      break;
    case LoopLemma::two_node:
      if (!has_symmetric_support(a)) {
        throw HypothesisError("two_node lemma needs a symmetric (undirected) support");
      }
      report.shift = 2;
      break;
    case LoopLemma::m_node:
      if (cycle.empty()) {
        if (m == 0) throw InputError("m_node lemma needs m >= 1 or an explicit cycle");
        auto found = find_directed_cycle(a, m);
        if (!found) {
          throw HypothesisError("graph has no directed cycle of length " + std::to_string(m));
        }
        cycle = std::move(*found);
      } else {
        if (m != 0 && m != cycle.size()) throw InputError("m_node: cycle length differs from m");
        if (!is_directed_cycle(a, cycle)) {
          throw HypothesisError("given node list is not a directed cycle of the graph");
        }
      }
      report.shift = cycle.size();
      report.cycle = cycle;
      break;
  }

  auto powers = support_powers(a, k_max + report.shift);
  std::vector<SupportPattern> restricted;
  if (lemma == LoopLemma::m_node) {
    std::vector<bool> on_cycle(a.n_rows(), false);
    for (std::size_t v : report.cycle) on_cycle[v] = true;
    restricted = cycle_touching_upto(a, on_cycle, k_max);
  }

  for (std::size_t k = 1; k <= k_max; ++k) {
    const SupportPattern& lhs = lemma == LoopLemma::m_node ? restricted[k - 1] : powers[k];
    const SupportPattern& rhs = powers[k + report.shift];
    LoopCheck check{k, support_subset(lhs, rhs), density(powers[k]), powers[k].count()};
    if (!check.holds && !report.first_counterexample) {
      std::size_t i = 0, j = 0;
      first_difference(lhs, rhs, i, j);
      report.first_counterexample = Counterexample{k, i, j};
    }
    report.checks.push_back(check);
  }
  return report;
}

DagProfile dag_profile(const SparseCountMatrix& a) {
  require_square(a, "dag_profile");
  const std::size_t n = a.n_rows();
  std::vector<std::size_t> in_degree(n, 0);
  for (std::size_t c : a.col_indices()) ++in_degree[c];

  DagProfile profile;
  std::vector<std::size_t>& order = profile.topo_order;
  order.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (in_degree[v] == 0) order.push_back(v);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (std::size_t w : a.row_cols(order[head])) {
      if (--in_degree[w] == 0) order.push_back(w);
    }
  }
  if (order.size() != n) {
    order.clear();
    return profile;
  }
  profile.is_dag = true;
  std::vector<std::size_t> depth(n, 0);
  for (std::size_t u : order) {
    for (std::size_t w : a.row_cols(u)) depth[w] = std::max(depth[w], depth[u] + 1);
    profile.longest_path_len = std::max(profile.longest_path_len, depth[u]);
  }
  return profile;
}

std::optional<SupportPeriodicity> support_periodicity(const SparseCountMatrix& a, std::size_t k_cap) {
  require_square(a, "support_periodicity");
  if (k_cap < 2) throw InputError("support_periodicity: k_cap must be at least 2");
  if (dag_profile(a).is_dag) {
    throw InputError("support_periodicity: matrix is nilpotent (acyclic); use dag_profile");
  }
  std::vector<SupportPattern> seq;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
  SupportPattern p = SupportPattern::identity(a.n_rows());
  for (std::size_t k = 1; k <= k_cap; ++k) {
    p = kernels::spgemm_support(p, a);
    auto& bucket = by_hash[pattern_hash(p)];
    for (std::size_t earlier : bucket) {
      if (seq[earlier - 1] == p) return SupportPeriodicity{earlier, k - earlier};
    }
    bucket.push_back(k);
    seq.push_back(p);
  }
  return std::nullopt;
}

Count path_count_oracle(const SparseCountMatrix& a, std::size_t k, std::size_t i, std::size_t j) {
  require_square(a, "path_count_oracle");
  const std::size_t n = a.n_rows();
  if (n > 12 || k > 6) throw InputError("path_count_oracle: limited to n <= 12 and k <= 6");
  if (i >= n || j >= n) throw InputError("path_count_oracle: node out of range");
  std::vector<Count> mult(n * n, 0);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) mult[u * n + v] = a.at(u, v);
  }
  Count walks = 0;
  std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t node, std::size_t left) {
    if (left == 0) {
      if (node == j) ++walks;
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      for (Count e = 0; e < mult[node * n + v]; ++e) dfs(v, left - 1);
    }
  };
  dfs(i, k);
  return walks;
}

bool binomial_expansion_check(const SparseCountMatrix& a, std::size_t k) {
  require_square(a, "binomial_expansion_check");
  const SparseCountMatrix lhs = mat_power_count(add_self_loops(a), k);
  SparseCountMatrix rhs = SparseCountMatrix::zeros(a.n_rows(), a.n_cols());
  SparseCountMatrix power = SparseCountMatrix::identity(a.n_rows());
  Count binom = 1;  // C(k, i)
  for (std::size_t i = 0; i <= k; ++i) {
    rhs = add(rhs, scale(power, binom));
    if (i == k) break;
    power = kernels::spgemm_count(power, a);
    // C(k, i+1) = C(k, i) * (k - i) / (i + 1); the product is divisible.
    Count num;
    if (__builtin_mul_overflow(binom, static_cast<Count>(k - i), &num)) {
      throw OverflowError("binomial coefficient exceeds 64-bit range");
    }
    binom = num / static_cast<Count>(i + 1);
  }
  return lhs == rhs;
}

}  // namespace hopscope

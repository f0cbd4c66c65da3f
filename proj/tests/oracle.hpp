#pragma once

// Exhaustive reference optimum for small models. Every assignment of the
// cf_exists variables is enumerated; the remaining variables fall into
// independent components once those are fixed, and each component is
// enumerated in full. Nothing here is shared with the branch and bound.

#include "tsschema/ilp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace tss::test {

struct OracleResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Assignment x;
  std::size_t core_vars = 0;
};

inline bool row_holds(const LinearConstraint& c, const Assignment& x) {
  double lhs = 0;
  for (const auto& t : c.terms) lhs += t.coef * x[static_cast<std::size_t>(t.var)];
  const double tol = 1e-9 * std::max(1.0, std::abs(c.rhs));
  switch (c.sense) {
    case Sense::le: return lhs <= c.rhs + tol;
    case Sense::ge: return lhs >= c.rhs - tol;
    case Sense::eq: return std::abs(lhs - c.rhs) <= tol;
  }
  return false;
}

inline OracleResult exhaustive_optimum(const IlpModel& m, std::size_t max_core = 24, std::size_t max_component = 22) {
  const std::size_t n = m.size();
  std::vector<int> core;
  std::vector<char> is_core(n, 0);
  for (std::size_t v = 0; v < n; ++v)
    if (m.vars[v].role == VarRole::cf_exists) {
      core.push_back(static_cast<int>(v));
      is_core[v] = 1;
    }
  if (core.size() > max_core) throw std::runtime_error("oracle: too many schema variables");

  // Union-find over non-core variables that share a row.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& c : m.constraints) {
    int first = -1;
    for (const auto& t : c.terms) {
      if (is_core[static_cast<std::size_t>(t.var)]) continue;
      if (first < 0)
        first = t.var;
      else
        parent[static_cast<std::size_t>(find(t.var))] = find(first);
    }
  }
  std::vector<std::vector<int>> comps;
  std::vector<int> comp_of(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (is_core[v]) continue;
    const int r = find(static_cast<int>(v));
    if (comp_of[static_cast<std::size_t>(r)] < 0) {
      comp_of[static_cast<std::size_t>(r)] = static_cast<int>(comps.size());
      comps.emplace_back();
    }
    comp_of[v] = comp_of[static_cast<std::size_t>(r)];
    comps[static_cast<std::size_t>(comp_of[v])].push_back(static_cast<int>(v));
  }
  std::vector<std::vector<const LinearConstraint*>> comp_rows(comps.size());
  std::vector<const LinearConstraint*> core_rows;
  for (const auto& c : m.constraints) {
    int comp = -1;
    for (const auto& t : c.terms)
      if (!is_core[static_cast<std::size_t>(t.var)]) comp = comp_of[static_cast<std::size_t>(t.var)];
    if (comp < 0)
      core_rows.push_back(&c);
    else
      comp_rows[static_cast<std::size_t>(comp)].push_back(&c);
  }
  for (const auto& comp : comps)
    if (comp.size() > max_component) throw std::runtime_error("oracle: component too large");

  OracleResult best;
  best.core_vars = core.size();
  Assignment x(n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << core.size()); ++mask) {
    std::fill(x.begin(), x.end(), 0);
    double cost = 0;
    for (std::size_t k = 0; k < core.size(); ++k)
      if (mask >> k & 1) {
        x[static_cast<std::size_t>(core[k])] = 1;
        cost += m.objective[core[k]];
      }
    bool ok = true;
    for (const auto* c : core_rows) ok = ok && row_holds(*c, x);
    for (std::size_t ci = 0; ok && ci < comps.size(); ++ci) {
      const auto& comp = comps[ci];
      double comp_best = std::numeric_limits<double>::infinity();
      std::uint64_t comp_arg = 0;
      for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << comp.size()); ++sub) {
        double c = 0;
        for (std::size_t k = 0; k < comp.size(); ++k) {
          const bool on = sub >> k & 1;
          x[static_cast<std::size_t>(comp[k])] = on;
          if (on) c += m.objective[comp[k]];
        }
        if (c >= comp_best) continue;
        bool holds = true;
        for (const auto* row : comp_rows[ci]) holds = holds && row_holds(*row, x);
        if (holds) {
          comp_best = c;
          comp_arg = sub;
        }
      }
      if (comp_best == std::numeric_limits<double>::infinity()) {
        ok = false;
        break;
      }
      for (std::size_t k = 0; k < comp.size(); ++k) x[static_cast<std::size_t>(comp[k])] = comp_arg >> k & 1;
      cost += comp_best;
    }
    if (ok && cost < best.objective) {
      best.feasible = true;
      best.objective = cost;
      best.x = x;
    }
  }
  // Recompute in variable order so the value is bitwise comparable with the
  // solver's evaluation of the same assignment.
  if (best.feasible) best.objective = evaluate(m.objective, best.x);
  return best;
}

} // namespace tss::test

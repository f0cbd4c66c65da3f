#include "tsschema/summary_tree.hpp"

#include "tsschema/error.hpp"

#include <chrono>
#include <limits>
#include <set>

namespace tss {

Eigen::MatrixXd pad_time_steps(const Eigen::MatrixXd& freq) {
  const Eigen::Index T = freq.cols();
  if (T < 2) throw Error("summary tree needs at least 2 time steps");
  Eigen::Index P = 1;
  while (P < T) P *= 2;
  Eigen::MatrixXd out(freq.rows(), P);
  out.leftCols(T) = freq;
  for (Eigen::Index t = T; t < P; ++t) out.col(t) = freq.col(T - 1);
  return out;
}

Eigen::MatrixXd node_frequencies(const Eigen::MatrixXd& freq, int min_ts, int mid_ts, int max_ts) {
  Eigen::MatrixXd out(freq.rows(), 3);
  out.col(0) = freq.col(min_ts - 1);
  out.col(1) = freq.col(mid_ts - 1);
  out.col(2) = freq.col(max_ts - 1);
  return out;
}

FixingMap translate_to_const(std::size_t candidate_count,
                             const std::vector<std::pair<int, std::vector<std::size_t>>>& schema) {
  FixingMap out;
  for (const auto& [t, present] : schema) {
    const std::set<std::size_t> on(present.begin(), present.end());
    for (std::size_t j = 0; j < candidate_count; ++j) out[{t, j}] = on.count(j) > 0;
  }
  return out;
}

namespace {

struct Tree {
  const Instance& inst;
  const Eigen::MatrixXd& freq;
  double interval;
  const TreeOptions& opts;
  std::set<std::size_t> used;
  std::vector<SummaryNode> nodes;

  std::vector<Fixing> fixings_for(const FixingMap& inherited, const int steps[3], bool keep_zero) const {
    std::vector<Fixing> out;
    for (int k = 0; k < 3; ++k)
      for (const auto& [key, value] : inherited)
        if (key.first == steps[k] && (value || keep_zero)) out.push_back({key.second, k + 1, value});
    return out;
  }

  void visit(int min_ts, int max_ts, const FixingMap& inherited, bool root) {
    if (min_ts + 1 == max_ts && !root) return;
    const auto start = std::chrono::steady_clock::now();
    const int mid_ts = (min_ts + max_ts) / 2;
    const int steps[3] = {min_ts, mid_ts, max_ts};
    SummaryNode node;
    node.min_ts = min_ts;
    node.mid_ts = mid_ts;
    node.max_ts = max_ts;
    node.inherited = inherited.size();

    const Eigen::MatrixXd f = node_frequencies(freq, min_ts, mid_ts, max_ts);
    ModelOptions mo;
    mo.storage_budget = opts.storage_budget;
    mo.fixings = fixings_for(inherited, steps, true);
    IlpModel m = build_model(inst, f, interval, mo);
    Solution s = solve(m, opts.limits);
    if (!s.has_assignment() && !inherited.empty()) {
      node.infeasible_fallback = true;
      mo.fixings = fixings_for(inherited, steps, false);
      m = build_model(inst, f, interval, mo);
      s = solve(m, opts.limits);
    }
    node.status = s.status;

    FixingMap child = inherited;
    if (s.has_assignment()) {
      std::vector<std::pair<int, std::vector<std::size_t>>> schema;
      std::set<std::size_t> chosen;
      for (int k = 0; k < 3; ++k) {
        std::vector<std::size_t> present;
        for (std::size_t j = 0; j < inst.candidates.cfs.size(); ++j)
          if (s.x[static_cast<std::size_t>(m.at({VarRole::cf_exists, static_cast<int>(j), k + 1}))]) {
            present.push_back(j);
            chosen.insert(j);
          }
        schema.emplace_back(steps[k], std::move(present));
      }
      for (const auto& [key, value] : translate_to_const(inst.candidates.cfs.size(), schema)) child[key] = value;
      for (std::size_t j : chosen) {
        node.chosen.push_back(inst.candidates.cfs[j].id);
        used.insert(j);
      }
    }
    node.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    nodes.push_back(std::move(node));
    if (min_ts + 1 == max_ts) return;
    visit(min_ts, mid_ts, child, false);
    visit(mid_ts, max_ts, child, false);
  }
};

} // namespace

SubtreeResult get_subtree_cfs(const Instance& inst, const Eigen::MatrixXd& freq, double interval, const TreeOptions& opts) {
  if (freq.cols() < 2) throw Error("summary tree needs at least 2 time steps");
  Tree tree{inst, freq, interval, opts, {}, {}};
  tree.visit(1, static_cast<int>(freq.cols()), {}, true);
  SubtreeResult out;
  for (std::size_t j : tree.used) out.interesting.push_back(inst.candidates.cfs[j].id);
  out.nodes = std::move(tree.nodes);
  return out;
}

std::vector<std::string> prune_candidates(const Instance& inst, const std::vector<std::string>& interesting,
                                          std::vector<std::string>* restored) {
  std::set<std::string> keep(interesting.begin(), interesting.end());
  for (const auto& q : inst.queries) {
    bool covered = false;
    std::size_t cheapest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < q.coverage.plans.size(); ++p) {
      bool all = true;
      double cost = 0;
      for (std::size_t k : q.coverage.plans[p]) {
        all = all && keep.count(q.coverage.cfs[k]);
        cost += q.cost[k];
      }
      covered = covered || all;
      if (cost < best) {
        best = cost;
        cheapest = p;
      }
    }
    if (covered || q.coverage.plans.empty()) continue;
    for (std::size_t k : q.coverage.plans[cheapest])
      if (keep.insert(q.coverage.cfs[k]).second && restored) restored->push_back(q.coverage.cfs[k]);
  }
  std::vector<std::string> out;
  for (const auto& cf : inst.candidates.cfs)
    if (keep.count(cf.id)) out.push_back(cf.id);
  return out;
}

nlohmann::json to_json(const SummaryNode& n) {
  return {{"min", n.min_ts},         {"mid", n.mid_ts}, {"max", n.max_ts}, {"chosen", n.chosen},
          {"infeasible_fallback", n.infeasible_fallback}, {"status", to_string(n.status)}};
}

} // namespace tss

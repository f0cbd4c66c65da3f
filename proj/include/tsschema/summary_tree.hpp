#pragma once

#include "tsschema/formulation.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tss {

/// Repeats the last column until the step count is a power of two.
Eigen::MatrixXd pad_time_steps(const Eigen::MatrixXd& freq);

/// Columns min, mid, max (1-based) of `freq`.
Eigen::MatrixXd node_frequencies(const Eigen::MatrixXd& freq, int min_ts, int mid_ts, int max_ts);

/// (original step, cf index) -> presence.
using FixingMap = std::map<std::pair<int, std::size_t>, bool>;

/// Pins every candidate at each listed step to its presence in `schema`.
FixingMap translate_to_const(std::size_t candidate_count, const std::vector<std::pair<int, std::vector<std::size_t>>>& schema);

struct SummaryNode {
  int min_ts = 0, mid_ts = 0, max_ts = 0;
  std::vector<std::string> chosen;
  std::size_t inherited = 0;
  bool infeasible_fallback = false;
  SolveStatus status = SolveStatus::optimal;
  double seconds = 0;
};

struct TreeOptions {
  std::optional<double> storage_budget;
  SolveLimits limits;
};

struct SubtreeResult {
  std::vector<std::string> interesting;  // candidate order
  std::vector<SummaryNode> nodes;        // preorder
};

/// Solves a three-step model per internal node, handing each child the
/// parent's schema at the steps they share, and collects every CF a node used.
SubtreeResult get_subtree_cfs(const Instance& inst, const Eigen::MatrixXd& freq, double interval, const TreeOptions& opts);

/// CF ids to keep: `interesting`, plus the cheapest plan's CFs for any query
/// that would otherwise lose all of its plans. `restored` lists those additions.
std::vector<std::string> prune_candidates(const Instance& inst, const std::vector<std::string>& interesting,
                                          std::vector<std::string>* restored = nullptr);

nlohmann::json to_json(const SummaryNode& n);

} // namespace tss

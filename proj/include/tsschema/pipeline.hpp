#pragma once

#include "tsschema/formulation.hpp"
#include "tsschema/summary_tree.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace tss {

struct Problem {
  EntityGraph graph;
  Workload workload;
  CostModel cost;
};

enum class Mode { proposed, static_avg, static_min_step, static_max_step, ideal_per_step, no_pruning };
std::string to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);

struct RunOptions {
  std::optional<double> budget_bytes;
  std::optional<double> budget_fraction;  // of the unconstrained static-average storage
  bool pruning = true;
  bool initial_load_cost = false;
  SolveLimits limits;
};

struct Report {
  Mode mode = Mode::proposed;
  Schedule schedule;
  std::size_t candidates_before = 0;
  std::size_t candidates_after = 0;
  std::size_t variables = 0;
  std::size_t constraints = 0;
  double cost_star = 0;
  double count_star = 0;
  std::vector<SummaryNode> nodes;
  std::vector<std::string> restored;
  std::vector<std::string> diagnostics;
  bool verified = false;
  std::vector<std::string> verify_messages;
  double enumerate_seconds = 0;
  double prune_seconds = 0;
  double solve_seconds = 0;
  double total_seconds = 0;

  double workload_total() const;
  double migration_total() const;
};

/// Storage of the lexicographic optimum for average frequencies, no budget.
double reference_storage(const Problem& p, const SolveLimits& limits = {});

/// Bytes, from `budget_bytes` or `budget_fraction`; nullopt when unconstrained.
std::optional<double> resolve_budget(const Problem& p, const RunOptions& opts);

/// Runs one mode end to end. The budget must already be resolved into
/// `opts.budget_bytes`.
Report run_mode(const Problem& p, Mode mode, const RunOptions& opts);

struct Comparison {
  std::optional<double> budget;
  std::vector<Report> reports;
};

Comparison compare(const Problem& p, const std::vector<Mode>& modes, RunOptions opts);

nlohmann::json to_json(const Report& r, bool timing = true);
nlohmann::json to_json(const Comparison& c, bool timing = true);
std::string render_table(const Comparison& c);

/// Index (1-based) of the step with the smallest / largest total frequency.
int extreme_step(const Workload& w, bool largest);

} // namespace tss

#pragma once

#include "tsschema/ilp.hpp"
#include "tsschema/instance.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tss {

/// Pins cf_exists(cf, t) to a value.
struct Fixing {
  std::size_t cf = 0;
  int t = 1;
  bool value = false;

  auto operator<=>(const Fixing&) const = default;
};

struct ModelOptions {
  std::optional<double> storage_budget;
  /// Charge the load cost of every CF present at the first step.
  bool initial_load_cost = false;
  std::vector<Fixing> fixings;
};

/// `freq` rows follow instance.statements, columns are steps.
IlpModel build_model(const Instance& inst, const Eigen::MatrixXd& freq, double interval, const ModelOptions& opts = {});

struct ScheduledMigration {
  int t = 1;  // transition t -> t+1
  std::string target_cf;
  std::string migration_query;  // origin statement id or "simple"
  std::string plan;
};

struct Schedule {
  SolveStatus status = SolveStatus::infeasible;
  double objective = 0;
  std::vector<double> workload;
  std::vector<double> migration;
  std::vector<std::vector<std::string>> schema;               // per step
  std::vector<std::map<std::string, std::string>> plans;       // per step: query -> plan id
  std::vector<ScheduledMigration> migrations;
  std::vector<double> storage;                                 // per step, bytes
  std::optional<double> budget;
  std::vector<std::string> candidates;                         // CF ids the model was built over
  std::string explanation;
};

Schedule decode(const Instance& inst, const IlpModel& m, const Solution& s);
/// Rebuilds an assignment from a schedule; the schedule's reported costs are
/// carried over so verify() compares them with the recomputation.
Solution encode(const Instance& inst, const IlpModel& m, const Schedule& sched);

nlohmann::json to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& doc);

/// Names the first query (or step) whose cheapest storage footprint exceeds
/// the budget, or reports that inherited fixings conflict.
std::string explain_infeasibility(const Instance& inst, const IlpModel& m);

} // namespace tss

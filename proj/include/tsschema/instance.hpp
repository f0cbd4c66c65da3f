#pragma once

#include "tsschema/migration.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tss {

/// Linear description of "choose exactly one plan" over the CFs a plan set
/// uses. Indices refer to `cfs`.
struct Coverage {
  std::vector<std::string> cfs;
  std::vector<std::vector<std::size_t>> plans;
  std::vector<std::vector<std::size_t>> exactly_one;
  /// (cf, predecessors): the cf may be used only after one of its predecessors.
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> precedence;
  /// CF sets that satisfy the rows above without being a plan.
  std::vector<std::vector<std::size_t>> exclusions;
};

/// Throws Error when the plan set is too large to verify exactness.
Coverage build_coverage(const std::vector<QueryPlan>& plans);

struct QueryGroup {
  std::size_t statement = 0;
  PlanGroup plans;
  Coverage coverage;
  std::vector<double> cost;  // C_ij per coverage CF
};

struct MigrationOptionInfo {
  std::string origin;
  std::string query_text;
  std::vector<std::string> plan_ids;
  Coverage coverage;
};

struct MigrationGroup {
  std::size_t target = 0;
  std::vector<MigrationOptionInfo> options;
};

struct UpdateGroup {
  std::size_t statement = 0;
  std::vector<std::size_t> cfs;
  std::vector<double> cost;  // C'_un per touched CF
  std::vector<bool> key_rewrite;
};

/// Everything about a problem that does not depend on frequencies.
struct Instance {
  EntityGraph graph;
  CostModel cost_model;
  std::vector<ParsedStatement> statements;
  CandidateSet candidates;
  std::vector<QueryGroup> queries;
  std::vector<MigrationGroup> migrations;  // parallel to candidates.cfs
  std::vector<MigrationPlanGroup> migration_plans;
  std::vector<UpdateGroup> updates;
  std::vector<double> extract_cost;
  std::vector<double> load_cost;
  std::vector<std::string> diagnostics;

  std::size_t cf_index(const std::string& id) const;
  std::optional<std::size_t> statement_index(const std::string& id) const;
};

/// Enumerates candidates, plans and migration plans. With `keep`, only the
/// listed CF ids remain candidates.
Instance build_instance(const EntityGraph& g, const Workload& w, const CostModel& m,
                        const std::optional<std::vector<std::string>>& keep = std::nullopt);

} // namespace tss

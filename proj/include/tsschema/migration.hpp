#pragma once

#include "tsschema/plans.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tss {

inline constexpr const char* kSimpleOrigin = "simple";

struct MigrationQuery {
  std::string target_cf;
  std::string origin;  // source statement id, or kSimpleOrigin
  QueryAst ast;
};

struct MigrationOption {
  MigrationQuery query;
  QueryGraph graph;
  std::vector<QueryPlan> plans;
};

struct MigrationPlanGroup {
  std::string target_cf;
  std::vector<MigrationOption> options;
  std::vector<std::string> diagnostics;
};

std::vector<std::string> find_source_queries(const std::string& target, const std::vector<PlanGroup>& groups);

/// Keeps FROM/WHERE, projects the target's attributes minus those bound by an
/// equality predicate, and drops aggregates, GROUP BY and ORDER BY. Throws
/// Error when a target attribute lies outside the source's entities.
MigrationQuery derive_migration_query(const ParsedStatement& source, const ColumnFamily& target);

/// Equality on the target's partition keys, projecting every stored attribute.
MigrationQuery simple_migration_query(const ColumnFamily& target);

/// Reuse options come from source-query plans that avoid the target and
/// jointly store its attributes; the simple option scans any other candidate
/// storing a superset of the target's attributes.
MigrationPlanGroup enumerate_migration_plans(const ColumnFamily& target, const CandidateSet& candidates,
                                             const std::vector<ParsedStatement>& statements,
                                             const std::vector<PlanGroup>& groups, const EntityGraph& g);

nlohmann::json to_json(const MigrationPlanGroup& group);

} // namespace tss

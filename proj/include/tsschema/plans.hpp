#pragma once

#include "tsschema/column_family.hpp"
#include "tsschema/cost_model.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace tss {

enum class ServerOp { order_by, group_by };
enum class ClientOp { join, filter, sort, group, aggregate };

struct GetStep {
  std::string cf;
  std::vector<AttrRef> bound;
  std::vector<ServerOp> server_ops;
  double gets = 1;             // Get invocations issued for this step
  double rows = 1;             // rows fetched across those Gets
  double out_cardinality = 1;  // rows handed on after client filtering
  /// Query-graph entities and edges (entity-graph edge indices) this step supplies.
  std::vector<std::string> nodes;
  std::vector<std::size_t> edges;
};

enum class PlanKind { mv, join };

struct QueryPlan {
  std::string id;
  std::string query;
  PlanKind kind = PlanKind::mv;
  std::vector<GetStep> steps;
  std::vector<ClientOp> client_ops;

  std::vector<std::string> cf_ids() const;
  bool uses(const std::string& cf) const;
};

struct PlanGroup {
  std::string query;
  QueryGraph graph;
  std::vector<QueryPlan> plans;
};

/// n = 1 + sum of the preceding step's output cardinality over later steps.
double count_get_ops(const QueryPlan& plan);

double step_cost(const GetStep& step, const ColumnFamily& cf, const CostModel& m);

/// Plans over CFs present in `candidates`. Throws Error naming the query when
/// no plan survives.
PlanGroup enumerate_plans(const ParsedStatement& q, const CandidateSet& candidates, const EntityGraph& g,
                          const CostModel& m);

struct UpdateTarget {
  std::string cf;
  double rows = 1;
  bool key_rewrite = false;
};

std::vector<UpdateTarget> enumerate_update_targets(const QueryAst& update, const CandidateSet& candidates,
                                                   const EntityGraph& g, const CostModel& m);

std::string to_string(ServerOp op);
std::string to_string(ClientOp op);
nlohmann::json to_json(const QueryPlan& p);
nlohmann::json to_json(const PlanGroup& g);

} // namespace tss

#include "tsschema/migration.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <set>

namespace tss {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string plan_id(const std::string& target, const std::string& origin, const std::vector<std::string>& cfs) {
  std::string key;
  for (const auto& c : cfs) key += c + "/";
  return target + ":" + origin + ":" + content_hash(key).substr(0, 8);
}

QueryGraph path_graph(const std::vector<std::string>& path, const EntityGraph& g) {
  QueryGraph qg;
  qg.nodes = path;
  for (std::size_t i = 1; i < path.size(); ++i) qg.edges.push_back(*g.edge_between(path[i - 1], path[i]));
  return qg;
}

} // namespace

std::vector<std::string> find_source_queries(const std::string& target, const std::vector<PlanGroup>& groups) {
  std::vector<std::string> out;
  for (const auto& group : groups)
    for (const auto& p : group.plans)
      if (p.uses(target)) {
        out.push_back(group.query);
        break;
      }
  return out;
}

MigrationQuery derive_migration_query(const ParsedStatement& source, const ColumnFamily& target) {
  MigrationQuery mq;
  mq.target_cf = target.id;
  mq.origin = source.statement.id;
  mq.ast.kind = StatementKind::query;
  mq.ast.from_path = source.ast.from_path;
  mq.ast.where = source.ast.where;
  const auto bound = source.ast.equality_attrs();
  for (const auto& a : target.attributes()) {
    if (!contains(source.ast.from_path, a.entity))
      throw Error("attribute " + a.str() + " of " + target.id + " is not reachable from '" + source.statement.id + "'");
    if (std::find(bound.begin(), bound.end(), a) != bound.end()) continue;
    if (std::find(mq.ast.select.begin(), mq.ast.select.end(), a) == mq.ast.select.end()) mq.ast.select.push_back(a);
  }
  return mq;
}

MigrationQuery simple_migration_query(const ColumnFamily& target) {
  MigrationQuery mq;
  mq.target_cf = target.id;
  mq.origin = kSimpleOrigin;
  mq.ast.kind = StatementKind::query;
  mq.ast.from_path = target.path;
  for (const auto& k : target.partition_keys) mq.ast.where.push_back({k, CompareOp::eq});
  mq.ast.select = target.attributes();
  return mq;
}

MigrationPlanGroup enumerate_migration_plans(const ColumnFamily& target, const CandidateSet& candidates,
                                             const std::vector<ParsedStatement>& statements,
                                             const std::vector<PlanGroup>& groups, const EntityGraph& g) {
  MigrationPlanGroup out;
  out.target_cf = target.id;
  const auto needed = target.attributes();
  auto covers = [&](const std::vector<std::string>& cfs) {
    std::set<AttrRef> stored;
    for (const auto& id : cfs)
      for (const auto& a : candidates.find(id)->attributes()) stored.insert(a);
    return std::all_of(needed.begin(), needed.end(), [&](const AttrRef& a) { return stored.count(a) > 0; });
  };

  std::set<std::string> single_step_sources;
  for (const auto& source_id : find_source_queries(target.id, groups)) {
    const auto st = std::find_if(statements.begin(), statements.end(),
                                 [&](const ParsedStatement& s) { return s.statement.id == source_id; });
    const auto grp = std::find_if(groups.begin(), groups.end(), [&](const PlanGroup& pg) { return pg.query == source_id; });
    MigrationOption opt;
    try {
      opt.query = derive_migration_query(*st, target);
    } catch (const Error& e) {
      out.diagnostics.push_back(e.what());
      continue;
    }
    opt.graph = grp->graph;
    for (const auto& p : grp->plans) {
      if (p.uses(target.id)) continue;
      const auto cfs = p.cf_ids();
      if (!covers(cfs)) continue;
      QueryPlan mp = p;
      mp.query = target.id + "/" + source_id;
      mp.id = plan_id(target.id, source_id, cfs);
      opt.plans.push_back(std::move(mp));
      if (cfs.size() == 1) single_step_sources.insert(cfs.front());
    }
    if (opt.plans.empty()) {
      out.diagnostics.push_back("no plan of '" + source_id + "' can populate " + target.id);
      continue;
    }
    out.options.push_back(std::move(opt));
  }

  MigrationOption simple;
  simple.query = simple_migration_query(target);
  simple.graph = path_graph(target.path, g);
  for (const auto& h : candidates.cfs) {
    if (h.id == target.id || single_step_sources.count(h.id) || !covers({h.id})) continue;
    QueryPlan mp;
    mp.query = target.id + "/" + kSimpleOrigin;
    mp.kind = PlanKind::mv;
    GetStep s;
    s.cf = h.id;
    s.bound = h.partition_keys;
    s.gets = 1;
    s.rows = h.est_rows;
    s.out_cardinality = h.est_rows;
    s.nodes = simple.graph.nodes;
    s.edges = simple.graph.edges;
    mp.steps.push_back(std::move(s));
    mp.id = plan_id(target.id, kSimpleOrigin, {h.id});
    simple.plans.push_back(std::move(mp));
  }
  if (!simple.plans.empty()) out.options.push_back(std::move(simple));
  if (out.options.empty())
    out.diagnostics.push_back(target.id + " has no migration plan; it can only exist from the first step");
  return out;
}

nlohmann::json to_json(const MigrationPlanGroup& group) {
  nlohmann::json options = nlohmann::json::array();
  for (const auto& o : group.options) {
    nlohmann::json plans = nlohmann::json::array();
    for (const auto& p : o.plans) plans.push_back(to_json(p));
    options.push_back({{"origin", o.query.origin}, {"query", render(o.query.ast)}, {"plans", plans}});
  }
  return {{"target_cf", group.target_cf}, {"queries", options}, {"diagnostics", group.diagnostics}};
}

} // namespace tss

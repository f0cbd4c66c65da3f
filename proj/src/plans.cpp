#include "tsschema/plans.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <set>

namespace tss {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

std::vector<Predicate> side_predicates(const QueryAst& q, const std::vector<std::string>& side) {
  std::vector<Predicate> out;
  for (const auto& p : q.where)
    if (contains(side, p.attr.entity)) out.push_back(p);
  return out;
}

std::string plan_id(const std::string& query, const std::vector<std::string>& cfs) {
  std::string key;
  for (const auto& c : cfs) key += c + "/";
  return query + ":" + content_hash(key).substr(0, 8);
}

struct Variant {
  ColumnFamily cf;
  QueryAst sub;
};

struct CutVariants {
  EdgeCut cut;
  std::vector<Variant> firsts;
  std::vector<Variant> seconds;
};

void add_variant(std::vector<Variant>& v, const ColumnFamily& cf, const QueryAst& sub) {
  for (const auto& x : v)
    if (x.cf.id == cf.id) return;
  v.push_back({cf, sub});
}

} // namespace

std::vector<std::string> QueryPlan::cf_ids() const {
  std::vector<std::string> out;
  for (const auto& s : steps) out.push_back(s.cf);
  return out;
}

bool QueryPlan::uses(const std::string& cf) const {
  return std::any_of(steps.begin(), steps.end(), [&](const GetStep& s) { return s.cf == cf; });
}

double count_get_ops(const QueryPlan& plan) {
  double n = 1;
  for (std::size_t k = 1; k < plan.steps.size(); ++k) n += plan.steps[k - 1].out_cardinality;
  return n;
}

double step_cost(const GetStep& step, const ColumnFamily& cf, const CostModel& m) {
  return m.query_time(step.gets, step.rows, cf.row_bytes);
}

PlanGroup enumerate_plans(const ParsedStatement& q, const CandidateSet& candidates, const EntityGraph& g,
                          const CostModel& m) {
  const QueryAst& orig = q.ast;
  const QueryGraph& qg = q.graph;
  const double rs = m.range_selectivity;
  PlanGroup group;
  group.query = q.statement.id;
  group.graph = qg;

  std::vector<CutVariants> cuts;
  std::set<std::string> mv_cfs;
  for (const auto& r : enumerate_relaxed_queries(orig, q.statement.id)) {
    const Decomposition d = decompose_query_graph(r.ast, qg, g);
    const ColumnFamily whole = materialize_cf(d.whole, g);
    if (candidates.contains(whole.id) && mv_cfs.insert(whole.id).second) {
      QueryPlan p;
      p.query = group.query;
      p.kind = PlanKind::mv;
      GetStep s;
      s.cf = whole.id;
      s.bound = whole.partition_keys;
      const bool server_group = !orig.group_by.empty();
      const bool server_order = !orig.order_by.empty() && r.ast.order_by == orig.order_by;
      if (server_group) s.server_ops.push_back(ServerOp::group_by);
      if (server_order) s.server_ops.push_back(ServerOp::order_by);
      s.gets = 1;
      s.rows = estimate_cardinality(r.ast, g, rs);
      s.out_cardinality = estimate_cardinality(orig, g, rs);
      s.nodes = qg.nodes;
      s.edges = qg.edges;
      p.steps.push_back(std::move(s));
      if (r.ast.where.size() < orig.where.size()) p.client_ops.push_back(ClientOp::filter);
      if (!orig.order_by.empty() && !server_order) p.client_ops.push_back(ClientOp::sort);
      if (!orig.aggregates.empty()) p.client_ops.push_back(ClientOp::aggregate);
      p.id = plan_id(p.query, p.cf_ids());
      group.plans.push_back(std::move(p));
    }
    for (const auto& cut : d.cuts) {
      auto it = std::find_if(cuts.begin(), cuts.end(), [&](const CutVariants& c) {
        return c.cut.position == cut.position && c.cut.first_entities == cut.first_entities;
      });
      if (it == cuts.end()) {
        cuts.push_back({cut, {}, {}});
        it = std::prev(cuts.end());
      }
      const ColumnFamily f = materialize_cf(cut.first, g);
      const ColumnFamily s = materialize_cf(cut.second, g);
      if (candidates.contains(f.id)) add_variant(it->firsts, f, cut.first);
      if (candidates.contains(s.id)) add_variant(it->seconds, s, cut.second);
    }
  }

  for (const auto& cv : cuts) {
    const EdgeCut& cut = cv.cut;
    QueryAst first_orig;
    first_orig.from_path = cut.first_entities;
    first_orig.where = side_predicates(orig, cut.first_entities);
    const auto second_orig_preds = side_predicates(orig, cut.second_entities);
    std::vector<std::size_t> first_edges, second_edges;
    for (std::size_t k = 0; k < qg.edges.size(); ++k) {
      const bool a = contains(cut.first_entities, qg.nodes[k]);
      const bool b = contains(cut.first_entities, qg.nodes[k + 1]);
      if (a || b)
        first_edges.push_back(qg.edges[k]);
      else
        second_edges.push_back(qg.edges[k]);
    }
    for (const auto& f : cv.firsts) {
      for (const auto& s : cv.seconds) {
        if (f.cf.id == s.cf.id || mv_cfs.count(f.cf.id) || mv_cfs.count(s.cf.id)) continue;
        QueryPlan p;
        p.query = group.query;
        p.kind = PlanKind::join;
        GetStep a;
        a.cf = f.cf.id;
        a.bound = f.cf.partition_keys;
        a.gets = 1;
        a.rows = estimate_cardinality(f.sub, g, rs);
        a.out_cardinality = estimate_cardinality(first_orig, g, rs);
        a.nodes = cut.first_entities;
        a.edges = first_edges;

        GetStep b;
        b.cf = s.cf.id;
        b.bound = s.cf.partition_keys;
        b.gets = a.out_cardinality;
        QueryAst fetched;
        fetched.from_path = orig.from_path;
        fetched.where = first_orig.where;
        for (const auto& pr : s.sub.where)
          if (pr.attr != cut.join_key) fetched.where.push_back(pr);
        b.rows = estimate_cardinality(fetched, g, rs);
        QueryAst result = orig;
        result.group_by.clear();
        b.out_cardinality = estimate_cardinality(result, g, rs);
        const bool server_order = !orig.order_by.empty() && s.sub.order_by == orig.order_by;
        if (server_order) b.server_ops.push_back(ServerOp::order_by);
        b.nodes = cut.second_entities;
        b.edges = second_edges;

        const std::size_t kept_first = side_predicates(f.sub, cut.first_entities).size();
        std::size_t kept_second = 0;
        for (const auto& pr : s.sub.where)
          if (pr.attr != cut.join_key) ++kept_second;
        p.steps = {std::move(a), std::move(b)};
        p.client_ops.push_back(ClientOp::join);
        if (kept_first < first_orig.where.size() || kept_second < second_orig_preds.size())
          p.client_ops.push_back(ClientOp::filter);
        if (!orig.order_by.empty() && !server_order) p.client_ops.push_back(ClientOp::sort);
        if (!orig.group_by.empty()) p.client_ops.push_back(ClientOp::group);
        if (!orig.aggregates.empty()) p.client_ops.push_back(ClientOp::aggregate);
        p.id = plan_id(p.query, p.cf_ids());
        group.plans.push_back(std::move(p));
      }
    }
  }
  if (group.plans.empty()) throw Error("no covering plan constructible for query '" + group.query + "'");
  return group;
}

std::vector<UpdateTarget> enumerate_update_targets(const QueryAst& update, const CandidateSet& candidates,
                                                   const EntityGraph& g, const CostModel& m) {
  std::vector<UpdateTarget> out;
  const std::string& entity = update.from_path.front();
  const double affected = estimate_cardinality(update, g, m.range_selectivity);
  const double count = static_cast<double>(g.entity(entity).record_count);
  for (const auto& cf : candidates.cfs) {
    bool touched = false, key = false;
    for (const auto& a : update.set_values) {
      if (cf.stores(a)) touched = true;
      if (cf.is_key(a)) key = true;
    }
    if (!touched) continue;
    out.push_back({cf.id, std::max(1.0, affected * cf.est_rows / count), key});
  }
  return out;
}

std::string to_string(ServerOp op) { return op == ServerOp::order_by ? "order_by" : "group_by"; }

std::string to_string(ClientOp op) {
  switch (op) {
  case ClientOp::join: return "join";
  case ClientOp::filter: return "filter";
  case ClientOp::sort: return "sort";
  case ClientOp::group: return "group";
  case ClientOp::aggregate: return "aggregate";
  }
  return "join";
}

nlohmann::json to_json(const QueryPlan& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps) {
    nlohmann::json bound = nlohmann::json::array(), ops = nlohmann::json::array();
    for (const auto& a : s.bound) bound.push_back(a.str());
    for (auto op : s.server_ops) ops.push_back(to_string(op));
    steps.push_back({{"cf", s.cf}, {"bound", bound}, {"server_ops", ops}, {"gets", s.gets}, {"card", s.out_cardinality}});
  }
  nlohmann::json client = nlohmann::json::array();
  for (auto op : p.client_ops) client.push_back(to_string(op));
  return {{"id", p.id}, {"kind", p.kind == PlanKind::mv ? "MV" : "join"}, {"steps", steps}, {"client_ops", client}};
}

nlohmann::json to_json(const PlanGroup& g) {
  nlohmann::json plans = nlohmann::json::array();
  for (const auto& p : g.plans) plans.push_back(to_json(p));
  return {{"query", g.query}, {"plans", plans}};
}

} // namespace tss

#include "tsschema/instance.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tss {

Coverage build_coverage(const std::vector<QueryPlan>& plans) {
  Coverage c;
  auto position = [&](const std::string& id) {
    auto it = std::find(c.cfs.begin(), c.cfs.end(), id);
    if (it != c.cfs.end()) return static_cast<std::size_t>(it - c.cfs.begin());
    c.cfs.push_back(id);
    return c.cfs.size() - 1;
  };
  std::map<std::string, std::set<std::size_t>> providers;
  std::vector<std::string> element_order;
  std::map<std::size_t, std::set<std::size_t>> preds;
  std::vector<std::size_t> pred_order;
  for (const auto& p : plans) {
    std::vector<std::size_t> pos;
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
      const auto& s = p.steps[k];
      const std::size_t j = position(s.cf);
      pos.push_back(j);
      auto provide = [&](const std::string& element) {
        if (!providers.count(element)) element_order.push_back(element);
        providers[element].insert(j);
      };
      for (const auto& e : s.edges) provide("e" + std::to_string(e));
      for (const auto& n : s.nodes) provide("n" + n);
      if (k > 0) {
        if (!preds.count(j)) pred_order.push_back(j);
        preds[j].insert(pos[k - 1]);
      }
    }
    c.plans.push_back(pos);
  }
  std::set<std::vector<std::size_t>> seen;
  for (const auto& element : element_order) {
    std::vector<std::size_t> row(providers[element].begin(), providers[element].end());
    if (seen.insert(row).second) c.exactly_one.push_back(row);
  }
  for (std::size_t j : pred_order) c.precedence.push_back({j, {preds[j].begin(), preds[j].end()}});

  const std::size_t n = c.cfs.size();
  if (n > 20) throw Error("plan set over " + std::to_string(n) + " column families is too large to encode exactly");
  std::set<std::uint32_t> plan_masks;
  for (const auto& p : c.plans) {
    std::uint32_t m = 0;
    for (std::size_t j : p) m |= 1u << j;
    plan_masks.insert(m);
  }
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    if (plan_masks.count(mask)) continue;
    auto on = [&](std::size_t j) { return (mask >> j) & 1u; };
    bool ok = true;
    for (const auto& row : c.exactly_one) {
      std::size_t s = 0;
      for (std::size_t j : row) s += on(j);
      if (s != 1) {
        ok = false;
        break;
      }
    }
    for (const auto& [j, ps] : c.precedence) {
      if (!ok) break;
      if (!on(j)) continue;
      ok = std::any_of(ps.begin(), ps.end(), [&](std::size_t p) { return on(p) != 0; });
    }
    if (!ok) continue;
    std::vector<std::size_t> spurious;
    for (std::size_t j = 0; j < n; ++j)
      if (on(j)) spurious.push_back(j);
    c.exclusions.push_back(std::move(spurious));
  }
  return c;
}

std::size_t Instance::cf_index(const std::string& id) const {
  auto i = candidates.index_of(id);
  if (!i) throw Error("unknown column family '" + id + "'");
  return *i;
}

std::optional<std::size_t> Instance::statement_index(const std::string& id) const {
  for (std::size_t i = 0; i < statements.size(); ++i)
    if (statements[i].statement.id == id) return i;
  return std::nullopt;
}

Instance build_instance(const EntityGraph& g, const Workload& w, const CostModel& m,
                        const std::optional<std::vector<std::string>>& keep) {
  m.validate();
  Instance inst;
  inst.graph = g;
  inst.cost_model = m;
  inst.statements = parse_workload(w, g);
  CandidateSet all = enumerate_candidates(inst.statements, g);
  inst.candidates = keep ? all.restricted(*keep) : std::move(all);

  std::vector<PlanGroup> groups;
  for (std::size_t i = 0; i < inst.statements.size(); ++i) {
    const auto& s = inst.statements[i];
    if (s.statement.kind != StatementKind::query) continue;
    QueryGroup q;
    q.statement = i;
    q.plans = enumerate_plans(s, inst.candidates, g, m);
    q.coverage = build_coverage(q.plans.plans);
    q.cost.assign(q.coverage.cfs.size(), 0.0);
    std::vector<bool> seen(q.coverage.cfs.size(), false);
    for (std::size_t p = 0; p < q.plans.plans.size(); ++p) {
      const auto& plan = q.plans.plans[p];
      for (std::size_t k = 0; k < plan.steps.size(); ++k) {
        const std::size_t j = q.coverage.plans[p][k];
        const double c = step_cost(plan.steps[k], *inst.candidates.find(plan.steps[k].cf), m);
        if (seen[j] && c != q.cost[j])
          inst.diagnostics.push_back(s.statement.id + ": " + plan.steps[k].cf +
                                     " is costed differently across plans; using the larger value");
        q.cost[j] = seen[j] ? std::max(q.cost[j], c) : c;
        seen[j] = true;
      }
    }
    groups.push_back(q.plans);
    inst.queries.push_back(std::move(q));
  }

  for (std::size_t j = 0; j < inst.candidates.cfs.size(); ++j) {
    const auto& cf = inst.candidates.cfs[j];
    inst.extract_cost.push_back(m.extract_time(cf.est_size));
    inst.load_cost.push_back(m.load_time(cf.est_size));
    MigrationPlanGroup mpg = enumerate_migration_plans(cf, inst.candidates, inst.statements, groups, g);
    MigrationGroup mg;
    mg.target = j;
    for (const auto& o : mpg.options) {
      MigrationOptionInfo info;
      info.origin = o.query.origin;
      info.query_text = render(o.query.ast);
      for (const auto& p : o.plans) info.plan_ids.push_back(p.id);
      info.coverage = build_coverage(o.plans);
      mg.options.push_back(std::move(info));
    }
    for (const auto& d : mpg.diagnostics) inst.diagnostics.push_back(d);
    inst.migrations.push_back(std::move(mg));
    inst.migration_plans.push_back(std::move(mpg));
  }

  for (std::size_t i = 0; i < inst.statements.size(); ++i) {
    const auto& s = inst.statements[i];
    if (s.statement.kind != StatementKind::update) continue;
    UpdateGroup u;
    u.statement = i;
    for (const auto& t : enumerate_update_targets(s.ast, inst.candidates, g, m)) {
      u.cfs.push_back(inst.cf_index(t.cf));
      u.cost.push_back(m.update_time(t.rows));
      u.key_rewrite.push_back(t.key_rewrite);
    }
    inst.updates.push_back(std::move(u));
  }
  return inst;
}

} // namespace tss

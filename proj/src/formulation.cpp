#include "tsschema/formulation.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace tss {

namespace {

VarKey x_key(std::size_t j, int t) { return {VarRole::cf_exists, static_cast<int>(j), t}; }
VarKey y_key(std::size_t i, std::size_t j, int t) { return {VarRole::query_uses, static_cast<int>(i), static_cast<int>(j), t}; }
VarKey l_key(std::size_t g, int t) { return {VarRole::mig_load, static_cast<int>(g), t}; }
VarKey m_key(std::size_t g, std::size_t o, int t) { return {VarRole::mig_tree, static_cast<int>(g), static_cast<int>(o), t}; }
VarKey e_key(std::size_t g, std::size_t o, std::size_t h, int t) {
  return {VarRole::mig_extract, static_cast<int>(g), static_cast<int>(o), static_cast<int>(h), t};
}

std::string step_label(int t) { return " t=" + std::to_string(t); }

/// Rows shared by query and migration plan choices: `use` maps a coverage
/// position to its usage variable, `exists` to the schema variable.
void add_choice_rows(IlpModel& m, const Coverage& cov, const std::vector<int>& use, const std::vector<int>& exists,
                     int selector, Family cover, Family precedence, Family exclusion, Family existence,
                     const std::string& label) {
  for (const auto& row : cov.exactly_one) {
    LinearConstraint c;
    for (std::size_t j : row) c.terms.push_back({use[j], 1.0});
    if (selector >= 0) {
      c.terms.push_back({selector, -1.0});
      c.rhs = 0;
    } else {
      c.rhs = 1;
    }
    c.sense = Sense::eq;
    c.family = cover;
    c.label = label;
    m.add(std::move(c));
  }
  for (const auto& [j, preds] : cov.precedence) {
    LinearConstraint c;
    for (std::size_t p : preds) c.terms.push_back({use[p], 1.0});
    c.terms.push_back({use[j], -1.0});
    c.sense = Sense::ge;
    c.rhs = 0;
    c.family = precedence;
    c.label = label;
    m.add(std::move(c));
  }
  for (const auto& set : cov.exclusions) {
    LinearConstraint c;
    for (std::size_t j : set) c.terms.push_back({use[j], 1.0});
    c.sense = Sense::le;
    c.rhs = static_cast<double>(set.size()) - 1;
    c.family = exclusion;
    c.label = label;
    m.add(std::move(c));
  }
  for (std::size_t j = 0; j < cov.cfs.size(); ++j) {
    LinearConstraint c;
    c.terms = {{exists[j], 1.0}, {use[j], -1.0}};
    c.sense = Sense::ge;
    c.rhs = 0;
    c.family = existence;
    c.label = label;
    m.add(std::move(c));
  }
}

} // namespace

IlpModel build_model(const Instance& inst, const Eigen::MatrixXd& freq, double interval, const ModelOptions& opts) {
  const int T = static_cast<int>(freq.cols());
  const std::size_t J = inst.candidates.cfs.size();
  if (T < 1) throw Error("frequency matrix has no time steps");
  if (static_cast<std::size_t>(freq.rows()) != inst.statements.size()) throw Error("frequency matrix rows must match statements");
  if (opts.storage_budget && !(*opts.storage_budget > 0)) throw ValidationError("budget", "storage budget must be positive");

  IlpModel m;
  m.time_steps = T;
  m.storage_budget = opts.storage_budget;
  m.step_schema.resize(static_cast<std::size_t>(T));

  auto f = [&](std::size_t stmt, int t) { return freq(static_cast<Eigen::Index>(stmt), t - 1); };

  for (int t = 1; t <= T; ++t) {
    const Bucket wb{false, t - 1};
    for (std::size_t j = 0; j < J; ++j) {
      double c = 0;
      for (const auto& u : inst.updates)
        for (std::size_t k = 0; k < u.cfs.size(); ++k)
          if (u.cfs[k] == j) c += f(u.statement, t) * u.cost[k];
      if (t == 1 && opts.initial_load_cost) c += inst.load_cost[j];
      m.step_schema[static_cast<std::size_t>(t - 1)].push_back(m.add_var(x_key(j, t), c, wb, inst.candidates.cfs[j].est_size));
    }
    for (const auto& q : inst.queries)
      for (std::size_t k = 0; k < q.coverage.cfs.size(); ++k)
        m.add_var(y_key(q.statement, inst.cf_index(q.coverage.cfs[k]), t), f(q.statement, t) * q.cost[k], wb);
  }
  for (int t = 1; t < T; ++t) {
    const Bucket mb{true, t - 1};
    for (std::size_t g = 0; g < J; ++g) {
      const auto& mg = inst.migrations[g];
      if (mg.options.empty()) continue;
      double load = inst.load_cost[g];
      for (const auto& u : inst.updates)
        for (std::size_t k = 0; k < u.cfs.size(); ++k)
          if (u.cfs[k] == g) load += maintenance_cost(f(u.statement, t), u.cost[k], inst.load_cost[g], interval);
      m.add_var(l_key(g, t), load, mb);
      for (std::size_t o = 0; o < mg.options.size(); ++o) {
        m.add_var(m_key(g, o, t), 0.0, mb);
        for (const auto& h : mg.options[o].coverage.cfs) {
          const std::size_t hi = inst.cf_index(h);
          m.add_var(e_key(g, o, hi, t), inst.extract_cost[hi], mb);
        }
      }
    }
  }

  for (int t = 1; t <= T; ++t) {
    if (opts.storage_budget) {
      LinearConstraint c;
      for (std::size_t j = 0; j < J; ++j) c.terms.push_back({m.at(x_key(j, t)), inst.candidates.cfs[j].est_size});
      c.sense = Sense::le;
      c.rhs = *opts.storage_budget;
      c.family = Family::storage;
      c.label = "storage" + step_label(t);
      if (!c.terms.empty()) m.add(std::move(c));
    }
    for (const auto& q : inst.queries) {
      const auto& cov = q.coverage;
      std::vector<int> use, exists;
      for (const auto& id : cov.cfs) {
        const std::size_t j = inst.cf_index(id);
        use.push_back(m.at(y_key(q.statement, j, t)));
        exists.push_back(m.at(x_key(j, t)));
      }
      add_choice_rows(m, cov, use, exists, -1, Family::query_cover, Family::query_precedence, Family::query_exclusion,
                      Family::query_existence, inst.statements[q.statement].statement.id + step_label(t));
      ChoiceGroup grp;
      grp.step = t;
      for (const auto& plan : cov.plans) {
        ChoiceOption o;
        for (std::size_t j : plan) {
          o.owned.push_back(use[j]);
          o.required.push_back(exists[j]);
        }
        grp.options.push_back(std::move(o));
      }
      m.groups.push_back(std::move(grp));
    }
  }
  for (int t = 1; t < T; ++t) {
    for (std::size_t g = 0; g < J; ++g) {
      const auto& mg = inst.migrations[g];
      const std::string label = inst.candidates.cfs[g].id + step_label(t);
      LinearConstraint link;
      link.terms = {{m.at(x_key(g, t + 1)), 1.0}, {m.at(x_key(g, t)), -1.0}};
      if (!mg.options.empty()) link.terms.push_back({m.at(l_key(g, t)), -1.0});
      link.sense = Sense::le;
      link.rhs = 0;
      link.family = Family::migration_link;
      link.label = label;
      m.add(std::move(link));
      if (mg.options.empty()) continue;
      const int load = m.at(l_key(g, t));
      LinearConstraint choose;
      for (std::size_t o = 0; o < mg.options.size(); ++o) choose.terms.push_back({m.at(m_key(g, o, t)), 1.0});
      choose.terms.push_back({load, -1.0});
      choose.sense = Sense::eq;
      choose.rhs = 0;
      choose.family = Family::mig_choice;
      choose.label = label;
      m.add(std::move(choose));
      ChoiceGroup grp;
      grp.step = t;
      grp.guard = load;
      for (std::size_t o = 0; o < mg.options.size(); ++o) {
        const auto& cov = mg.options[o].coverage;
        const int tree = m.at(m_key(g, o, t));
        std::vector<int> use, exists;
        for (const auto& id : cov.cfs) {
          const std::size_t h = inst.cf_index(id);
          use.push_back(m.at(e_key(g, o, h, t)));
          exists.push_back(m.at(x_key(h, t)));
        }
        add_choice_rows(m, cov, use, exists, tree, Family::mig_cover, Family::mig_precedence, Family::mig_exclusion,
                        Family::mig_existence, label + " via " + mg.options[o].origin);
        for (const auto& plan : cov.plans) {
          ChoiceOption opt;
          opt.owned.push_back(tree);
          for (std::size_t j : plan) {
            opt.owned.push_back(use[j]);
            opt.required.push_back(exists[j]);
          }
          grp.options.push_back(std::move(opt));
        }
      }
      m.groups.push_back(std::move(grp));
    }
  }
  for (const auto& fx : opts.fixings) {
    if (fx.t < 1 || fx.t > T || fx.cf >= J) continue;
    LinearConstraint c;
    c.terms = {{m.at(x_key(fx.cf, fx.t)), 1.0}};
    c.sense = Sense::eq;
    c.rhs = fx.value ? 1.0 : 0.0;
    c.family = Family::inherited;
    c.label = inst.candidates.cfs[fx.cf].id + step_label(fx.t);
    m.add(std::move(c));
  }
  return m;
}

Schedule decode(const Instance& inst, const IlpModel& m, const Solution& s) {
  Schedule out;
  out.status = s.status;
  out.objective = s.objective;
  out.workload = s.workload;
  out.migration = s.migration;
  out.budget = m.storage_budget;
  for (const auto& cf : inst.candidates.cfs) out.candidates.push_back(cf.id);
  if (!s.has_assignment()) return out;
  const int T = m.time_steps;
  auto on = [&](const VarKey& k) {
    const int v = m.find(k);
    return v >= 0 && s.x[static_cast<std::size_t>(v)] != 0;
  };
  for (int t = 1; t <= T; ++t) {
    std::vector<std::string> schema;
    double storage = 0;
    for (std::size_t j = 0; j < inst.candidates.cfs.size(); ++j)
      if (on(x_key(j, t))) {
        schema.push_back(inst.candidates.cfs[j].id);
        storage += inst.candidates.cfs[j].est_size;
      }
    out.schema.push_back(std::move(schema));
    out.storage.push_back(storage);
    std::map<std::string, std::string> plans;
    for (const auto& q : inst.queries) {
      std::set<std::size_t> used;
      for (std::size_t k = 0; k < q.coverage.cfs.size(); ++k)
        if (on(y_key(q.statement, inst.cf_index(q.coverage.cfs[k]), t))) used.insert(k);
      for (std::size_t p = 0; p < q.coverage.plans.size(); ++p)
        if (std::set<std::size_t>(q.coverage.plans[p].begin(), q.coverage.plans[p].end()) == used)
          plans[inst.statements[q.statement].statement.id] = q.plans.plans[p].id;
    }
    out.plans.push_back(std::move(plans));
  }
  for (int t = 1; t < T; ++t) {
    for (std::size_t g = 0; g < inst.migrations.size(); ++g) {
      if (!on(l_key(g, t))) continue;
      const auto& mg = inst.migrations[g];
      for (std::size_t o = 0; o < mg.options.size(); ++o) {
        if (!on(m_key(g, o, t))) continue;
        const auto& cov = mg.options[o].coverage;
        std::set<std::size_t> used;
        for (std::size_t k = 0; k < cov.cfs.size(); ++k)
          if (on(e_key(g, o, inst.cf_index(cov.cfs[k]), t))) used.insert(k);
        std::string plan;
        for (std::size_t p = 0; p < cov.plans.size(); ++p)
          if (std::set<std::size_t>(cov.plans[p].begin(), cov.plans[p].end()) == used) plan = mg.options[o].plan_ids[p];
        out.migrations.push_back({t, inst.candidates.cfs[g].id, mg.options[o].origin, plan});
      }
    }
  }
  return out;
}

Solution encode(const Instance& inst, const IlpModel& m, const Schedule& sched) {
  Solution s;
  s.status = sched.status;
  s.x.assign(m.size(), 0);
  s.found = true;
  const int T = m.time_steps;
  if (static_cast<int>(sched.schema.size()) != T || static_cast<int>(sched.plans.size()) != T)
    throw ValidationError("schedule", "schedule covers " + std::to_string(sched.schema.size()) + " steps, model has " +
                                          std::to_string(T));
  auto set = [&](const VarKey& k, const std::string& what) {
    const int v = m.find(k);
    if (v < 0) throw ValidationError("schedule", what + " has no decision variable in the model");
    s.x[static_cast<std::size_t>(v)] = 1;
  };
  for (int t = 1; t <= T; ++t) {
    for (const auto& id : sched.schema[static_cast<std::size_t>(t - 1)]) set(x_key(inst.cf_index(id), t), id);
    for (const auto& [query, plan_id] : sched.plans[static_cast<std::size_t>(t - 1)]) {
      auto qi = inst.statement_index(query);
      if (!qi) throw ValidationError("schedule.plans", "unknown query '" + query + "'");
      auto q = std::find_if(inst.queries.begin(), inst.queries.end(), [&](const QueryGroup& g) { return g.statement == *qi; });
      if (q == inst.queries.end()) throw ValidationError("schedule.plans", "'" + query + "' is not a query");
      bool found = false;
      for (const auto& p : q->plans.plans)
        if (p.id == plan_id) {
          for (const auto& cf : p.cf_ids()) set(y_key(*qi, inst.cf_index(cf), t), query + " plan " + plan_id);
          found = true;
        }
      if (!found) throw ValidationError("schedule.plans", "unknown plan '" + plan_id + "' for '" + query + "'");
    }
  }
  for (const auto& mig : sched.migrations) {
    const std::size_t g = inst.cf_index(mig.target_cf);
    set(l_key(g, mig.t), "migration of " + mig.target_cf);
    const auto& mg = inst.migrations[g];
    bool found = false;
    for (std::size_t o = 0; o < mg.options.size() && !found; ++o) {
      if (mg.options[o].origin != mig.migration_query) continue;
      set(m_key(g, o, mig.t), "migration query " + mig.migration_query);
      for (std::size_t p = 0; p < mg.options[o].plan_ids.size(); ++p) {
        if (mg.options[o].plan_ids[p] != mig.plan) continue;
        for (std::size_t k : mg.options[o].coverage.plans[p])
          set(e_key(g, o, inst.cf_index(mg.options[o].coverage.cfs[k]), mig.t), "migration plan " + mig.plan);
        found = true;
      }
    }
    if (!found) throw ValidationError("schedule.migrations", "unknown migration plan '" + mig.plan + "'");
  }
  s.objective = sched.objective;
  s.workload = sched.workload;
  s.migration = sched.migration;
  return s;
}

nlohmann::json to_json(const Schedule& s) {
  using nlohmann::json;
  json plans = json::object();
  for (std::size_t t = 0; t < s.plans.size(); ++t) plans[std::to_string(t + 1)] = s.plans[t];
  json migrations = json::array();
  for (const auto& m : s.migrations)
    migrations.push_back({{"t", m.t}, {"target_cf", m.target_cf}, {"migration_query", m.migration_query}, {"plan", m.plan}});
  json out = {{"status", to_string(s.status)},
              {"objective", s.objective},
              {"breakdown", {{"workload", s.workload}, {"migration", s.migration}}},
              {"schema", s.schema},
              {"plans", plans},
              {"migrations", migrations},
              {"storage", s.storage},
              {"candidates", s.candidates}};
  out["budget"] = s.budget ? json(*s.budget) : json(nullptr);
  if (!s.explanation.empty()) out["explanation"] = s.explanation;
  return out;
}

Schedule schedule_from_json(const nlohmann::json& doc) {
  Schedule s;
  try {
    const std::string status = doc.at("status").get<std::string>();
    s.status = status == "optimal" ? SolveStatus::optimal
               : status == "infeasible" ? SolveStatus::infeasible
                                        : SolveStatus::budget_exceeded;
    s.objective = doc.at("objective").get<double>();
    s.workload = doc.at("breakdown").at("workload").get<std::vector<double>>();
    s.migration = doc.at("breakdown").at("migration").get<std::vector<double>>();
    s.schema = doc.at("schema").get<std::vector<std::vector<std::string>>>();
    for (std::size_t t = 1; t <= s.schema.size(); ++t) {
      const auto key = std::to_string(t);
      s.plans.push_back(doc.at("plans").contains(key) ? doc.at("plans").at(key).get<std::map<std::string, std::string>>()
                                                      : std::map<std::string, std::string>{});
    }
    for (const auto& m : doc.at("migrations"))
      s.migrations.push_back({m.at("t").get<int>(), m.at("target_cf").get<std::string>(),
                              m.at("migration_query").get<std::string>(), m.at("plan").get<std::string>()});
    if (doc.contains("storage")) s.storage = doc.at("storage").get<std::vector<double>>();
    if (doc.contains("candidates")) s.candidates = doc.at("candidates").get<std::vector<std::string>>();
    if (doc.contains("budget") && !doc.at("budget").is_null()) s.budget = doc.at("budget").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("schedule", std::string("malformed schedule: ") + e.what());
  }
  return s;
}

std::string explain_infeasibility(const Instance& inst, const IlpModel& m) {
  const double B = m.storage_budget.value_or(std::numeric_limits<double>::infinity());
  for (const auto& q : inst.queries) {
    double cheapest = std::numeric_limits<double>::infinity();
    for (const auto& plan : q.coverage.plans) {
      double s = 0;
      for (std::size_t j : plan) s += inst.candidates.find(q.coverage.cfs[j])->est_size;
      cheapest = std::min(cheapest, s);
    }
    if (cheapest > B)
      return "query '" + inst.statements[q.statement].statement.id + "' has no plan within the storage budget (smallest needs " +
             std::to_string(cheapest) + " bytes, budget " + std::to_string(B) + ")";
  }
  for (const auto& c : m.constraints)
    if (c.family == Family::inherited) return "the storage budget or inherited schema fixings leave no feasible schema";
  return "no combination of plans for all queries fits the storage budget at some step";
}

} // namespace tss

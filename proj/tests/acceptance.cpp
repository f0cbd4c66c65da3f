// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "oracle.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace tss;

namespace {

constexpr double kRelTol = 1e-9;            // dominance, sweep and verification
constexpr double kPruneGap = 0.05;          // pruned vs unpruned objective
constexpr double kOlsTol = 1e-6;            // recovered coefficients
constexpr double kOracleSeconds = 10;       // all oracle fixtures together
constexpr double kDominanceSeconds = 300;   // full comparison run
constexpr std::size_t kOracleCoreLimit = 24;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool le_rel(double a, double b) { return a <= b + kRelTol * std::max(std::abs(a), std::abs(b)); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

// Schedules gathered for the independent check.
struct Emitted {
  Problem problem;
  Schedule schedule;
  std::string name;
  bool per_step = false;  // lower-bound schedules are checked one step at a time
};
std::vector<Emitted> g_emitted;
struct RawSolution {
  IlpModel model;
  Solution solution;
  std::string name;
};
std::vector<RawSolution> g_raw;

void emit(const Problem& p, const Report& r, const std::string& name) {
  g_emitted.push_back({p, r.schedule, name + "/" + to_string(r.mode), r.mode == Mode::ideal_per_step});
}

Problem two_group(int T) {
  return test::load_problem("two_group_schema.json", T == 6 ? "two_group_t6_workload.json" : "two_group_t12_workload.json");
}

Problem user_item_lookup() { return test::load_problem("user_item_schema.json", "user_item_lookup_workload.json"); }

std::map<std::string, PlanKind> plan_kinds(const Problem& p) {
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  std::map<std::string, PlanKind> out;
  for (const auto& q : inst.queries)
    for (const auto& plan : q.plans.plans) out[plan.id] = plan.kind;
  return out;
}

// --- 1 -----------------------------------------------------------------------

Outcome oracle_equivalence() {
  Outcome o;
  struct Case {
    std::string name;
    Problem p;
    std::optional<double> budget;
  };
  std::vector<Case> cases;
  for (int T : {1, 2, 3}) cases.push_back({"user_item T=" + std::to_string(T), test::with_steps(test::user_item(), T), {}});
  cases.push_back({"chain T=2", test::chain(), {}});
  cases.push_back({"user_item T=2 budget", test::user_item(), 1'000'000.0});
  cases.push_back({"user_item_lookup T=2 budget", user_item_lookup(), 1'200'000.0});

  const auto t0 = Clock::now();
  std::size_t widest = 0;
  for (const auto& c : cases) {
    const Instance inst = build_instance(c.p.graph, c.p.workload, c.p.cost);
    const IlpModel m = test::model_for(c.p, inst, c.budget);
    const test::OracleResult ref = test::exhaustive_optimum(m, kOracleCoreLimit);
    const Solution s = solve(m);
    widest = std::max(widest, ref.core_vars);
    o.require(ref.feasible == (s.status == SolveStatus::optimal), c.name + ": feasibility differs");
    if (!ref.feasible) continue;
    const double got = evaluate(m.objective, s.x);
    o.require(got == ref.objective, c.name + ": " + std::to_string(got) + " != " + std::to_string(ref.objective));
    g_raw.push_back({m, s, c.name});
  }
  const double secs = since(t0);
  o.require(secs < kOracleSeconds, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail << cases.size() << " fixtures, at most " << widest << " schema variables, " << secs << " s";
  return o;
}

// --- 2 -----------------------------------------------------------------------

using Row = std::pair<std::vector<std::pair<std::string, double>>, std::pair<int, double>>;

// Sign-normalised row over role names: >= becomes <=, equalities start positive.
Row canonical(const LinearConstraint& c, const std::function<std::string(int)>& name) {
  std::vector<std::pair<std::string, double>> terms;
  for (const auto& t : c.terms) terms.emplace_back(name(t.var), t.coef);
  std::sort(terms.begin(), terms.end());
  double sign = c.sense == Sense::ge ? -1 : 1;
  if (c.sense == Sense::eq && !terms.empty() && terms.front().second < 0) sign = -1;
  for (auto& t : terms) t.second *= sign;
  const int sense = c.sense == Sense::eq ? 0 : 1;
  return {terms, {sense, c.rhs * sign}};
}

Row make_row(std::vector<std::pair<std::string, double>> terms, Sense s, double rhs) {
  LinearConstraint c;
  std::vector<std::string> names;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    c.terms.push_back({static_cast<int>(k), terms[k].second});
    names.push_back(terms[k].first);
  }
  c.sense = s;
  c.rhs = rhs;
  return canonical(c, [&](int v) { return names[static_cast<std::size_t>(v)]; });
}

Outcome constraint_fidelity() {
  Outcome o;
  const Problem p = user_item_lookup();
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  const IlpModel m = test::model_for(p, inst);
  auto cf = [&](const std::string& shape) -> int {
    for (std::size_t j = 0; j < inst.candidates.cfs.size(); ++j)
      if (inst.candidates.cfs[j].describe() == shape) return static_cast<int>(j);
    return -1;
  };
  std::map<int, std::string> role{
      {cf("[user.id][] -> [user.name, user.email]"), "user"},
      {cf("[item.quantity][item.id, user.id] -> [user.name, user.email]"), "qty_mv"},
      {cf("[item.quantity][item.id] -> [user.id]"), "qty_item"},
      {cf("[item.id][] -> [item.quantity, user.id, user.name, user.email]"), "lookup_mv"},
  };
  if (role.count(-1)) {
    o.require(false, "expected CF shapes missing");
    return o;
  }
  const int q2 = static_cast<int>(*inst.statement_index("q2"));
  const int g = cf("[item.quantity][item.id, user.id] -> [user.name, user.email]");
  const auto& options = inst.migrations[static_cast<std::size_t>(g)].options;
  auto option_role = [&](int idx) { return options[static_cast<std::size_t>(idx)].origin == "q2" ? std::string("src") : std::string("simple"); };
  auto cf_role = [&](int j) { return role.count(j) ? role.at(j) : "cf" + std::to_string(j); };
  auto name = [&](int v) -> std::string {
    const VarKey& k = m.vars[static_cast<std::size_t>(v)];
    switch (k.role) {
      case VarRole::cf_exists: return "x:" + cf_role(k.a);
      case VarRole::query_uses: return "y:" + cf_role(k.b);
      case VarRole::mig_extract: return "e:" + option_role(k.b) + ":" + cf_role(k.c);
      case VarRole::mig_load: return "l";
      case VarRole::mig_tree: return "m:" + option_role(k.b);
    }
    return "?";
  };

  // Query side at t = 1.
  std::set<int> ys;
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m.vars[v].role == VarRole::query_uses && m.vars[v].a == q2 && m.vars[v].c == 1) ys.insert(static_cast<int>(v));
  std::multiset<Row> got_q, want_q;
  for (const auto& c : m.constraints)
    for (const auto& t : c.terms)
      if (ys.count(t.var)) {
        got_q.insert(canonical(c, name));
        break;
      }
  want_q = {
      make_row({{"y:qty_item", 1}, {"y:user", -1}}, Sense::ge, 0),
      make_row({{"y:qty_mv", 1}, {"y:qty_item", 1}}, Sense::eq, 1),
      make_row({{"y:user", 1}, {"y:qty_mv", 1}}, Sense::eq, 1),
      make_row({{"x:user", 1}, {"y:user", -1}}, Sense::ge, 0),
      make_row({{"x:qty_mv", 1}, {"y:qty_mv", -1}}, Sense::ge, 0),
      make_row({{"x:qty_item", 1}, {"y:qty_item", -1}}, Sense::ge, 0),
  };
  o.require(got_q == want_q, "query rows differ (" + std::to_string(got_q.size()) + " found)");

  // Migration side for the quantity MV built between steps 1 and 2.
  std::set<int> mig;
  for (std::size_t v = 0; v < m.size(); ++v) {
    const VarKey& k = m.vars[v];
    const bool mine = (k.role == VarRole::mig_extract || k.role == VarRole::mig_tree || k.role == VarRole::mig_load) &&
                      k.a == g;
    if (mine) mig.insert(static_cast<int>(v));
  }
  std::multiset<Row> got_m;
  for (const auto& c : m.constraints) {
    if (c.family == Family::migration_link) continue;
    for (const auto& t : c.terms)
      if (mig.count(t.var)) {
        got_m.insert(canonical(c, name));
        break;
      }
  }
  const std::multiset<Row> want_m = {
      make_row({{"e:src:qty_item", 1}, {"e:src:user", -1}}, Sense::ge, 0),
      make_row({{"m:simple", 1}, {"m:src", 1}, {"l", -1}}, Sense::eq, 0),
      make_row({{"e:src:qty_item", 1}, {"m:src", -1}}, Sense::eq, 0),
      make_row({{"e:src:user", 1}, {"m:src", -1}}, Sense::eq, 0),
      make_row({{"e:simple:lookup_mv", 1}, {"m:simple", -1}}, Sense::eq, 0),
      make_row({{"x:user", 1}, {"e:src:user", -1}}, Sense::ge, 0),
      make_row({{"x:qty_item", 1}, {"e:src:qty_item", -1}}, Sense::ge, 0),
      make_row({{"x:lookup_mv", 1}, {"e:simple:lookup_mv", -1}}, Sense::ge, 0),
  };
  o.require(got_m == want_m, "migration rows differ (" + std::to_string(got_m.size()) + " found)");
  if (o.pass) o.detail << got_q.size() << " query rows, " << got_m.size() << " migration rows matched";
  return o;
}

// --- 3 -----------------------------------------------------------------------

Outcome enumeration_bound() {
  Outcome o;
  auto ent = [](const std::string& n, std::uint64_t rows, const std::string& fk) {
    Entity e{n, rows, {{"id", rows, 8}, {"label", rows, 16}}, "id"};
    if (!fk.empty()) e.attributes.push_back({fk, rows / 10, 8});
    return e;
  };
  const EntityGraph g({ent("a", 10, ""), ent("b", 100, "a_id"), ent("c", 1000, "b_id"), ent("d", 10000, "c_id")},
                      {{"a", "b", "a_id"}, {"b", "c", "b_id"}, {"c", "d", "c_id"}});
  const char* queries[] = {
      "SELECT a.label FROM a WHERE a.id = ?",
      "SELECT a.label FROM a.b WHERE b.label = ?",
      "SELECT a.label FROM a.b.c WHERE c.label = ?",
      "SELECT a.label, c.label FROM a.b.c.d WHERE d.label = ?",
  };
  for (std::size_t k = 0; k < 4; ++k) {
    const auto ast = parse(queries[k], StatementKind::query, g);
    const QueryGraph qg = build_query_graph(ast, g);
    const Decomposition d = decompose_query_graph(ast, qg, g);
    o.require(qg.edge_count() == k && d.subqueries().size() == 1 + 2 * k,
              "k=" + std::to_string(k) + " gave " + std::to_string(d.subqueries().size()));
    if (o.pass) o.detail << (k ? ", " : "") << "k=" << k << ":" << d.subqueries().size();
  }
  return o;
}

// --- 4, 5 --------------------------------------------------------------------

struct TwoGroupRun {
  Problem p = two_group(12);
  Comparison c;
  double seconds = 0;
};

const TwoGroupRun& two_group_run() {
  static TwoGroupRun run = [] {
    TwoGroupRun r;
    RunOptions opts;
    opts.budget_fraction = 0.8;
    const auto t0 = Clock::now();
    r.c = compare(r.p, {Mode::proposed, Mode::static_avg, Mode::static_min_step, Mode::static_max_step, Mode::ideal_per_step},
                  opts);
    r.seconds = since(t0);
    for (const auto& rep : r.c.reports) emit(r.p, rep, "two_group T=12 0.8");
    return r;
  }();
  return run;
}

Outcome dominance() {
  Outcome o;
  const TwoGroupRun& run = two_group_run();
  const Report& prop = run.c.reports.at(0);
  o.require(prop.schedule.status == SolveStatus::optimal, "proposed not optimal");
  bool strict = false;
  for (const auto& r : run.c.reports) {
    if (r.mode == Mode::proposed) continue;
    if (r.mode == Mode::ideal_per_step) {
      o.require(le_rel(r.workload_total(), prop.workload_total()), "ideal workload exceeds proposed");
      continue;
    }
    o.require(r.schedule.status == SolveStatus::optimal, to_string(r.mode) + " not optimal");
    o.require(le_rel(prop.schedule.objective, r.schedule.objective), to_string(r.mode) + " beats proposed");
    strict = strict || prop.schedule.objective < r.schedule.objective * (1 - kRelTol);
  }
  o.require(strict, "no static baseline is strictly worse");
  o.require(run.seconds < kDominanceSeconds, "took " + std::to_string(run.seconds) + " s");
  if (o.pass) {
    o.detail << "proposed " << prop.schedule.objective;
    for (const auto& r : run.c.reports)
      if (r.mode != Mode::proposed)
        o.detail << ", " << to_string(r.mode) << " "
                 << (r.mode == Mode::ideal_per_step ? r.workload_total() : r.schedule.objective);
    o.detail << " (" << run.seconds << " s)";
  }
  return o;
}

Outcome migration_swap() {
  Outcome o;
  const TwoGroupRun& run = two_group_run();
  const Schedule& s = run.c.reports.at(0).schedule;
  const auto kinds = plan_kinds(run.p);
  auto kind = [&](int t, const std::string& q) { return kinds.at(s.plans.at(static_cast<std::size_t>(t)).at(q)); };
  std::vector<std::string> found;
  for (int t = 0; t + 1 < static_cast<int>(s.plans.size()); ++t)
    for (const char* qa : {"q1a", "q2a"})
      for (const char* qb : {"q1b", "q2b"}) {
        const bool a_down = kind(t, qa) == PlanKind::mv && kind(t + 1, qa) == PlanKind::join;
        const bool a_up = kind(t, qa) == PlanKind::join && kind(t + 1, qa) == PlanKind::mv;
        const bool b_down = kind(t, qb) == PlanKind::mv && kind(t + 1, qb) == PlanKind::join;
        const bool b_up = kind(t, qb) == PlanKind::join && kind(t + 1, qb) == PlanKind::mv;
        if ((a_down && b_up) || (a_up && b_down))
          found.push_back(std::to_string(t + 1) + "->" + std::to_string(t + 2) + " " + qa + "/" + qb);
      }
  o.require(!found.empty(), "no opposite plan change found");
  if (o.pass) o.detail << found.size() << " swaps, first at " << found.front() << ", " << s.migrations.size() << " migrations";
  return o;
}

// --- 6 -----------------------------------------------------------------------

Outcome pruning() {
  Outcome o;
  RunOptions opts;
  opts.budget_fraction = 0.8;
  for (int T : {6, 12}) {
    const Problem p = two_group(T);
    const Comparison c = compare(p, {Mode::proposed, Mode::no_pruning}, opts);
    const Report& pr = c.reports.at(0);
    const Report& np = c.reports.at(1);
    emit(p, pr, "two_group T=" + std::to_string(T));
    emit(p, np, "two_group T=" + std::to_string(T));
    const std::string tag = "T=" + std::to_string(T) + ": ";
    o.require(pr.candidates_after < pr.candidates_before, tag + "no candidate dropped");
    o.require(pr.variables < np.variables, tag + "variable count not reduced");
    const double gap = std::abs(pr.schedule.objective - np.schedule.objective) / np.schedule.objective;
    o.require(gap <= kPruneGap, tag + "objective gap " + std::to_string(gap));
    if (T == 12) o.require(pr.total_seconds < np.total_seconds, tag + "pruned run not faster");
    if (o.pass)
      o.detail << (T == 6 ? "" : "; ") << tag << pr.candidates_before << "->" << pr.candidates_after << " CFs, "
               << np.variables << "->" << pr.variables << " vars, gap " << gap << ", " << pr.total_seconds << " s vs "
               << np.total_seconds << " s";
  }
  return o;
}

// --- 7 -----------------------------------------------------------------------

// A CF present at t must serve a plan at t, feed a migration out of t, or be
// kept into t+1 and be needed there.
std::vector<std::string> unjustified(const Problem& p, const Schedule& s) {
  std::optional<std::vector<std::string>> keep;
  if (!s.candidates.empty()) keep = s.candidates;
  const Instance inst = build_instance(p.graph, p.workload, p.cost, keep);
  std::map<std::string, std::vector<std::string>> plan_cfs;
  for (const auto& q : inst.queries)
    for (const auto& plan : q.plans.plans) plan_cfs[plan.id] = plan.cf_ids();
  for (const auto& g : inst.migration_plans)
    for (const auto& opt : g.options)
      for (const auto& plan : opt.plans) plan_cfs[plan.id] = plan.cf_ids();

  const int T = static_cast<int>(s.schema.size());
  std::vector<std::set<std::string>> used(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    for (const auto& [q, plan] : s.plans[static_cast<std::size_t>(t)])
      for (const auto& cf : plan_cfs.at(plan)) used[static_cast<std::size_t>(t)].insert(cf);
  for (const auto& mg : s.migrations)
    for (const auto& cf : plan_cfs.at(mg.plan)) used[static_cast<std::size_t>(mg.t - 1)].insert(cf);

  std::vector<std::string> bad;
  for (int t = T - 1; t >= 0; --t) {
    const auto& here = s.schema[static_cast<std::size_t>(t)];
    for (const auto& cf : here) {
      bool ok = used[static_cast<std::size_t>(t)].count(cf) > 0;
      if (!ok && t + 1 < T) {
        const auto& next = s.schema[static_cast<std::size_t>(t + 1)];
        ok = std::find(next.begin(), next.end(), cf) != next.end() && used[static_cast<std::size_t>(t + 1)].count(cf);
      }
      if (ok) used[static_cast<std::size_t>(t)].insert(cf);
      else bad.push_back(cf + "@" + std::to_string(t + 1));
    }
  }
  return bad;
}

Outcome lexicographic() {
  Outcome o;
  struct Case {
    std::string name;
    Problem p;
    std::optional<double> budget;
  };
  std::vector<Case> cases{{"user_item", test::user_item(), {}},
                          {"user_item budget", test::user_item(), 1'000'000.0},
                          {"user_item_lookup", user_item_lookup(), {}},
                          {"chain", test::chain(), {}},
                          {"two_group T=6", two_group(6), resolve_budget(two_group(6), RunOptions{std::nullopt, 0.8})}};
  int checked = 0;
  for (const auto& c : cases) {
    const Instance inst = build_instance(c.p.graph, c.p.workload, c.p.cost);
    const IlpModel m = test::model_for(c.p, inst, c.budget);
    LexicographicTrace tr;
    const Solution s = solve_lexicographic(m, {}, &tr);
    if (s.status != SolveStatus::optimal) {
      o.require(false, c.name + ": not optimal");
      continue;
    }
    const double cap = tr.cost_star * (1 + kLexEpsilon) + 1e-12;
    o.require(evaluate(m.objective, tr.phase2.x) <= cap, c.name + ": phase 2 raised cost");
    o.require(evaluate(m.objective, tr.phase3.x) <= cap, c.name + ": phase 3 raised cost");
    auto count = [&](const Assignment& x) {
      double n = 0;
      for (const auto& step : m.step_schema)
        for (int v : step) n += x[static_cast<std::size_t>(v)];
      return n;
    };
    o.require(count(tr.phase3.x) <= tr.count_star + 1e-9, c.name + ": phase 3 raised CF count");
    o.require(count(tr.phase2.x) <= count(tr.phase1.x), c.name + ": phase 2 count above phase 1");
    g_raw.push_back({m, s, c.name + " lexicographic"});
    ++checked;
  }

  // Minimality on update-free workloads, through the full pipeline.
  int schedules = 0;
  for (const auto& [name, p] : std::vector<std::pair<std::string, Problem>>{{"user_item", test::user_item()},
                                                                          {"user_item_lookup", user_item_lookup()}})
    for (double fraction : {1.0, 0.8, 0.6}) {
      RunOptions opts;
      opts.budget_fraction = fraction;
      const Comparison c = compare(p, {Mode::proposed, Mode::no_pruning}, opts);
      for (const auto& r : c.reports) {
        if (r.schedule.status != SolveStatus::optimal) continue;
        emit(p, r, name + " " + std::to_string(fraction));
        const auto bad = unjustified(p, r.schedule);
        o.require(bad.empty(), name + ": unused " + (bad.empty() ? "" : bad.front()));
        ++schedules;
      }
    }
  o.require(schedules > 0, "no update-free schedule solved");
  if (o.pass) o.detail << checked << " models, " << schedules << " update-free schedules minimal";
  return o;
}

// --- 8 -----------------------------------------------------------------------

Outcome cost_recovery() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> feature(1, 1e4), coef(0.001, 5);
  double worst = 0;
  for (Regression kind : {Regression::query, Regression::update, Regression::extract, Regression::load}) {
    const int k = kind == Regression::query ? 3 : 1;
    Eigen::VectorXd planted(k + 1);
    for (int i = 0; i <= k; ++i) planted(i) = coef(rng);
    Profile prof;
    prof.kind = kind;
    prof.features.resize(30, k);
    prof.latency.resize(30);
    for (int r = 0; r < 30; ++r) {
      double y = planted(0);
      for (int c = 0; c < k; ++c) {
        prof.features(r, c) = feature(rng);
        y += planted(c + 1) * prof.features(r, c);
      }
      prof.latency(r) = y;
    }
    const FitResult fit = fit_ols(prof);
    const double err = (fit.coefficients - planted).cwiseAbs().maxCoeff();
    worst = std::max(worst, err);
    o.require(err <= kOlsTol, "coefficient error " + std::to_string(err));
  }
  const double cu = maintenance_cost(10, 2, 30, 60);
  o.require(std::abs(cu - 10) <= kOlsTol, "maintenance spot value " + std::to_string(cu));
  if (o.pass) o.detail << "max coefficient error " << worst << ", maintenance spot " << cu;
  return o;
}

// --- 9 -----------------------------------------------------------------------

Outcome budget_sweep() {
  Outcome o;
  const Problem p = two_group(12);
  const auto kinds = plan_kinds(p);
  // Single-entity queries only have an MV plan; judge the ones that can join.
  std::set<std::string> joinable;
  {
    const Instance inst = build_instance(p.graph, p.workload, p.cost);
    for (const auto& q : inst.queries)
      for (const auto& plan : q.plans.plans)
        if (plan.kind == PlanKind::join) joinable.insert(q.plans.query);
  }
  std::vector<std::pair<double, std::optional<double>>> points;
  std::string regime;
  for (double fraction : {1.0, 0.9, 0.8, 0.7}) {
    RunOptions opts;
    opts.budget_fraction = fraction;
    const Comparison c = compare(p, {Mode::proposed}, opts);
    const Report& r = c.reports.at(0);
    emit(p, r, "sweep " + std::to_string(fraction));
    if (r.schedule.status == SolveStatus::infeasible) {
      points.emplace_back(fraction, std::nullopt);
      if (regime.empty()) regime = std::to_string(fraction) + " infeasible";
      continue;
    }
    points.emplace_back(fraction, r.schedule.objective);
    bool join_only = true;
    for (const auto& step : r.schedule.plans)
      for (const auto& [q, plan] : step)
        if (joinable.count(q)) join_only = join_only && kinds.at(plan) == PlanKind::join;
    if (join_only && regime.empty()) regime = std::to_string(fraction) + " join-only";
  }
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto& [fa, a] = points[k - 1];
    const auto& [fb, b] = points[k];
    if (!a || !b) {
      o.require(!a ? !b : true, "feasible at a smaller budget than an infeasible one");
      continue;
    }
    o.require(le_rel(*a, *b), "objective rises with budget between " + std::to_string(fb) + " and " + std::to_string(fa));
  }
  o.require(!regime.empty(), "no fraction forces join-only plans or infeasibility");
  if (o.pass) {
    for (const auto& [f, v] : points) o.detail << f << ":" << (v ? std::to_string(*v) : "infeasible") << " ";
    o.detail << "(" << regime << ")";
  }
  return o;
}

// --- 10 ----------------------------------------------------------------------

Outcome independent_check() {
  Outcome o;
  std::size_t checked = 0;
  auto report = [&](const std::string& name, const VerifyReport& v) {
    ++checked;
    if (!v.ok())
      o.require(false, name + ": " + std::to_string(v.violations.size()) + " violations, " +
                           std::to_string(v.mismatches.size()) + " mismatches");
  };
  for (const auto& r : g_raw) report(r.name, verify(r.model, r.solution));
  for (const auto& e : g_emitted) {
    if (e.schedule.status != SolveStatus::optimal) continue;
    if (!e.per_step) {
      report(e.name, test::check_schedule(e.problem, e.schedule));
      continue;
    }
    for (std::size_t t = 0; t < e.schedule.schema.size(); ++t) {
      Problem step = e.problem;
      step.workload = summarize_frequencies(e.problem.workload, AtStep{static_cast<int>(t) + 1});
      Schedule one;
      one.status = e.schedule.status;
      one.schema = {e.schedule.schema[t]};
      one.plans = {e.schedule.plans[t]};
      one.workload = {e.schedule.workload[t]};
      one.objective = e.schedule.workload[t];
      one.storage = {e.schedule.storage[t]};
      one.budget = e.schedule.budget;
      one.candidates = e.schedule.candidates;
      report(e.name + " step " + std::to_string(t + 1), test::check_schedule(step, one));
    }
  }
  o.require(checked > 0, "nothing to check");
  if (o.pass) o.detail << checked << " schedules checked, 0 violations";
  return o;
}

} // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"oracle equivalence", oracle_equivalence},
      {"constraint instantiation", constraint_fidelity},
      {"decomposition size", enumeration_bound},
      {"dominance over static schemas", dominance},
      {"opposite plan swap", migration_swap},
      {"candidate pruning", pruning},
      {"lexicographic phases", lexicographic},
      {"cost model recovery", cost_recovery},
      {"budget sweep", budget_sweep},
      {"independent verification", independent_check},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    failed += out.pass ? 0 : 1;
    std::printf("criterion %2d %-32s %s  %s\n", n, name, out.pass ? "PASS" : "FAIL", out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed;
}

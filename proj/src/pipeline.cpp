#include "tsschema/pipeline.hpp"

#include "tsschema/error.hpp"

#include <chrono>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace tss {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

void check_into(Report& r, const Instance& inst, const IlpModel& m, const Solution& s) {
  if (!s.has_assignment()) return;
  const VerifyReport v = verify(m, encode(inst, m, r.schedule));
  r.verified = v.ok();
  for (const auto& x : v.violations) r.verify_messages.push_back("violated " + to_string(x.family) + " " + x.label);
  for (const auto& x : v.mismatches) r.verify_messages.push_back(x);
}

struct Solved {
  IlpModel model;
  Solution solution;
  LexicographicTrace trace;
};

Solved solve_full(const Instance& inst, const Eigen::MatrixXd& freq, double interval, const RunOptions& opts,
                  const std::vector<Fixing>& fixings = {}) {
  ModelOptions mo;
  mo.storage_budget = opts.budget_bytes;
  mo.initial_load_cost = opts.initial_load_cost;
  mo.fixings = fixings;
  Solved out{build_model(inst, freq, interval, mo), {}, {}};
  out.solution = solve_lexicographic(out.model, opts.limits, &out.trace);
  return out;
}

void fill(Report& r, const Instance& inst, const Solved& s) {
  r.schedule = decode(inst, s.model, s.solution);
  r.variables = s.model.size();
  r.constraints = s.model.constraints.size();
  r.cost_star = s.trace.cost_star;
  r.count_star = s.trace.count_star;
  if (s.solution.status == SolveStatus::infeasible) r.schedule.explanation = explain_infeasibility(inst, s.model);
  check_into(r, inst, s.model, s.solution);
}

Report run_static(const Problem& p, Mode mode, const RunOptions& opts, const Instance& inst, const Eigen::MatrixXd& freq) {
  Report r;
  r.mode = mode;
  SummaryMode sm = Average{};
  if (mode == Mode::static_min_step) sm = AtStep{extreme_step(p.workload, false)};
  if (mode == Mode::static_max_step) sm = AtStep{extreme_step(p.workload, true)};
  const Workload one = summarize_frequencies(p.workload, sm);
  auto start = Clock::now();
  const Solved single = solve_full(inst, one.frequency_matrix(), p.workload.interval, opts);
  if (!single.solution.has_assignment()) {
    fill(r, inst, single);
    r.solve_seconds = since(start);
    return r;
  }
  std::vector<Fixing> fixings;
  for (int t = 1; t <= p.workload.time_steps; ++t)
    for (std::size_t j = 0; j < inst.candidates.cfs.size(); ++j)
      fixings.push_back({j, t, single.solution.x[static_cast<std::size_t>(single.model.at({VarRole::cf_exists, static_cast<int>(j), 1}))] != 0});
  const Solved full = solve_full(inst, freq, p.workload.interval, opts, fixings);
  fill(r, inst, full);
  r.solve_seconds = since(start);
  return r;
}

Report run_ideal(const Problem& p, const RunOptions& opts, const Instance& inst, const Eigen::MatrixXd& freq) {
  Report r;
  r.mode = Mode::ideal_per_step;
  auto start = Clock::now();
  Schedule& s = r.schedule;
  s.status = SolveStatus::optimal;
  s.budget = opts.budget_bytes;
  for (const auto& cf : inst.candidates.cfs) s.candidates.push_back(cf.id);
  r.verified = true;
  for (int t = 1; t <= p.workload.time_steps; ++t) {
    const Solved one = solve_full(inst, freq.col(t - 1), p.workload.interval, opts);
    const Schedule part = decode(inst, one.model, one.solution);
    r.variables += one.model.size();
    r.constraints += one.model.constraints.size();
    if (!one.solution.has_assignment() || one.solution.status != SolveStatus::optimal) {
      s.status = one.solution.status;
      s.explanation = "step " + std::to_string(t) + ": " + explain_infeasibility(inst, one.model);
      r.verified = false;
      if (!one.solution.has_assignment()) break;
    }
    Report step;
    step.schedule = part;
    check_into(step, inst, one.model, one.solution);
    r.verified = r.verified && step.verified;
    for (const auto& msg : step.verify_messages) r.verify_messages.push_back("step " + std::to_string(t) + ": " + msg);
    s.schema.push_back(part.schema[0]);
    s.plans.push_back(part.plans[0]);
    s.storage.push_back(part.storage[0]);
    s.workload.push_back(part.workload[0]);
    if (t > 1) s.migration.push_back(0);
    s.objective += part.workload[0];
  }
  r.schedule.status = s.status;
  r.solve_seconds = since(start);
  return r;
}

} // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::proposed: return "proposed";
    case Mode::static_avg: return "static_avg";
    case Mode::static_min_step: return "static_min_step";
    case Mode::static_max_step: return "static_max_step";
    case Mode::ideal_per_step: return "ideal_per_step";
    case Mode::no_pruning: return "no_pruning";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::proposed, Mode::static_avg, Mode::static_min_step, Mode::static_max_step, Mode::ideal_per_step,
                 Mode::no_pruning})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

double Report::workload_total() const { return std::accumulate(schedule.workload.begin(), schedule.workload.end(), 0.0); }
double Report::migration_total() const {
  return std::accumulate(schedule.migration.begin(), schedule.migration.end(), 0.0);
}

int extreme_step(const Workload& w, bool largest) {
  const Eigen::VectorXd total = w.frequency_matrix().colwise().sum().transpose();
  int best = 0;
  for (int t = 1; t < total.size(); ++t)
    if (largest ? total(t) > total(best) : total(t) < total(best)) best = t;
  return best + 1;
}

double reference_storage(const Problem& p, const SolveLimits& limits) {
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  const Workload avg = summarize_frequencies(p.workload, Average{});
  RunOptions opts;
  opts.limits = limits;
  const Solved s = solve_full(inst, avg.frequency_matrix(), p.workload.interval, opts);
  if (!s.solution.has_assignment()) throw Error("reference optimisation for the budget fraction found no schema");
  double storage = 0;
  for (std::size_t v = 0; v < s.model.size(); ++v)
    if (s.solution.x[v]) storage += s.model.storage_weight[v];
  return storage;
}

std::optional<double> resolve_budget(const Problem& p, const RunOptions& opts) {
  if (opts.budget_bytes) {
    if (!(*opts.budget_bytes > 0)) throw ValidationError("budget", "storage budget must be positive");
    return opts.budget_bytes;
  }
  if (opts.budget_fraction) {
    const double f = *opts.budget_fraction;
    if (!(f > 0 && f <= 1)) throw ValidationError("budget_fraction", "fraction must lie in (0, 1]");
    return f * reference_storage(p, opts.limits);
  }
  return std::nullopt;
}

Report run_mode(const Problem& p, Mode mode, const RunOptions& opts) {
  const auto start = Clock::now();
  const Eigen::MatrixXd freq = p.workload.frequency_matrix();
  Instance inst = build_instance(p.graph, p.workload, p.cost);
  const double enumerate_seconds = since(start);
  Report r;
  if (mode == Mode::static_avg || mode == Mode::static_min_step || mode == Mode::static_max_step) {
    r = run_static(p, mode, opts, inst, freq);
  } else if (mode == Mode::ideal_per_step) {
    r = run_ideal(p, opts, inst, freq);
  } else {
    r.mode = mode;
    r.candidates_before = inst.candidates.cfs.size();
    const bool prune = mode == Mode::proposed && opts.pruning && p.workload.time_steps >= 2;
    if (prune) {
      const auto t0 = Clock::now();
      TreeOptions to{opts.budget_bytes, opts.limits};
      SubtreeResult tree = get_subtree_cfs(inst, pad_time_steps(freq), p.workload.interval, to);
      const auto keep = prune_candidates(inst, tree.interesting, &r.restored);
      r.nodes = std::move(tree.nodes);
      inst = build_instance(p.graph, p.workload, p.cost, keep);
      r.prune_seconds = since(t0);
    }
    const auto t1 = Clock::now();
    fill(r, inst, solve_full(inst, freq, p.workload.interval, opts));
    r.solve_seconds = since(t1);
  }
  r.candidates_before = r.candidates_before ? r.candidates_before : inst.candidates.cfs.size();
  r.candidates_after = inst.candidates.cfs.size();
  r.diagnostics = inst.diagnostics;
  r.enumerate_seconds = enumerate_seconds;
  r.total_seconds = since(start);
  return r;
}

Comparison compare(const Problem& p, const std::vector<Mode>& modes, RunOptions opts) {
  Comparison c;
  c.budget = resolve_budget(p, opts);
  opts.budget_bytes = c.budget;
  opts.budget_fraction.reset();
  c.reports.push_back(run_mode(p, Mode::proposed, opts));
  for (Mode m : modes)
    if (m != Mode::proposed) c.reports.push_back(run_mode(p, m, opts));
  return c;
}

nlohmann::json to_json(const Report& r, bool timing) {
  nlohmann::json out = {{"mode", to_string(r.mode)},
                        {"schedule", to_json(r.schedule)},
                        {"totals", {{"workload", r.workload_total()}, {"migration", r.migration_total()}}},
                        {"candidates", {{"before", r.candidates_before}, {"after", r.candidates_after}}},
                        {"model", {{"variables", r.variables}, {"constraints", r.constraints}}},
                        {"lexicographic", {{"cost_star", r.cost_star}, {"count_star", r.count_star}}},
                        {"verification", {{"ok", r.verified}, {"messages", r.verify_messages}}},
                        {"diagnostics", r.diagnostics}};
  if (!r.nodes.empty()) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : r.nodes) {
      auto j = to_json(n);
      if (timing) j["seconds"] = n.seconds;
      nodes.push_back(std::move(j));
    }
    out["prune"] = {{"nodes", nodes}, {"restored", r.restored}};
  }
  if (timing)
    out["timing"] = {{"enumerate", r.enumerate_seconds},
                     {"prune", r.prune_seconds},
                     {"solve", r.solve_seconds},
                     {"total", r.total_seconds}};
  return out;
}

nlohmann::json to_json(const Comparison& c, bool timing) {
  nlohmann::json reports = nlohmann::json::array();
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : c.reports) {
    reports.push_back(to_json(r, timing));
    double peak = 0;
    for (double s : r.schedule.storage) peak = std::max(peak, s);
    rows.push_back({{"mode", to_string(r.mode)},
                    {"status", to_string(r.schedule.status)},
                    {"objective", r.schedule.objective},
                    {"workload", r.workload_total()},
                    {"migration", r.migration_total()},
                    {"peak_storage", peak},
                    {"candidates", r.candidates_after}});
  }
  nlohmann::json out = {{"table", rows}, {"reports", reports}};
  out["budget"] = c.budget ? nlohmann::json(*c.budget) : nlohmann::json(nullptr);
  return out;
}

std::string render_table(const Comparison& c) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-16s %-16s %14s %14s %12s %14s %6s\n", "mode", "status", "objective", "workload",
                "migration", "peak_storage", "cfs");
  os << line;
  for (const auto& r : c.reports) {
    double peak = 0;
    for (double s : r.schedule.storage) peak = std::max(peak, s);
    std::snprintf(line, sizeof line, "%-16s %-16s %14.6g %14.6g %12.6g %14.6g %6zu\n", to_string(r.mode).c_str(),
                  to_string(r.schedule.status).c_str(), r.schedule.objective, r.workload_total(), r.migration_total(),
                  peak, r.candidates_after);
    os << line;
  }
  return os.str();
}

} // namespace tss

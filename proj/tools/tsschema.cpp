// tsschema: time-dependent schema optimisation for extensible record stores.
#include "tsschema/domain_io.hpp"
#include "tsschema/error.hpp"
#include "tsschema/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace tss;

enum Exit { ok = 0, failure = 1, infeasible = 2, invalid = 3, over_budget = 4 };

struct Inputs {
  std::string schema, workload, cost_model;
  std::optional<double> budget, fraction;
  double time_limit = 600;
  std::uint64_t node_limit = UINT64_MAX;
  bool initial_load = false;
  std::string out;
  bool no_timing = false;

  void bind(CLI::App* cmd, bool with_budget = true) {
    cmd->add_option("--schema", schema, "schema document (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--workload", workload, "workload document (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--cost-model", cost_model, "cost coefficients (JSON); defaults apply when omitted")
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out, "output path (stdout when omitted)");
    if (!with_budget) return;
    auto* b = cmd->add_option("--budget", budget, "storage budget in bytes");
    cmd->add_option("--budget-fraction", fraction, "budget as a fraction of the unconstrained average-frequency storage")
        ->excludes(b);
    cmd->add_option("--time-limit", time_limit, "solver wall-clock limit per solve, seconds");
    cmd->add_option("--node-limit", node_limit, "solver node limit per solve");
    cmd->add_flag("--initial-load", initial_load, "charge the load cost of CFs present at the first step");
    cmd->add_flag("--no-timing", no_timing, "omit timing fields for byte-identical reports");
  }

  Problem load() const {
    auto [g, w] = load_domain(read_file(schema), read_file(workload));
    CostModel m;
    if (!cost_model.empty()) m = cost_model_from_json(parse_json_document(read_file(cost_model), "cost model"));
    m.validate();
    return {std::move(g), std::move(w), m};
  }

  RunOptions options() const {
    RunOptions o;
    o.budget_bytes = budget;
    o.budget_fraction = fraction;
    o.initial_load_cost = initial_load;
    o.limits = {time_limit, node_limit};
    return o;
  }

  void emit(const std::string& text) const {
    if (out.empty()) {
      std::cout << text << '\n';
      return;
    }
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << text << '\n';
  }
};

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return ok;
    case SolveStatus::infeasible: return infeasible;
    case SolveStatus::budget_exceeded: return over_budget;
  }
  return failure;
}

nlohmann::json attr_list(const std::vector<AttrRef>& attrs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : attrs) out.push_back(a.str());
  return out;
}

nlohmann::json cf_json(const ColumnFamily& cf) {
  return {{"id", cf.id},
          {"partition", attr_list(cf.partition_keys)},
          {"clustering_prefix", attr_list(cf.clustering_prefix)},
          {"clustering_tail", attr_list(cf.clustering_tail)},
          {"values", attr_list(cf.values)},
          {"entities", cf.path},
          {"est_rows", cf.est_rows},
          {"est_size", cf.est_size}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-dependent schema optimisation for extensible record stores"};
  app.require_subcommand(1);

  Inputs opt_in;
  bool no_pruning = false;
  std::string baseline;
  auto* optimize = app.add_subcommand("optimize", "choose a schema, plans and migrations for every time step");
  opt_in.bind(optimize);
  optimize->add_flag("--no-pruning", no_pruning, "skip the summary-tree candidate pruning");
  optimize->add_option("--baseline", baseline, "run a baseline instead")
      ->check(CLI::IsMember({"static_avg", "static_min_step", "static_max_step", "ideal_per_step", "no_pruning"}));

  Inputs cmp_in;
  std::vector<std::string> modes{"static_avg", "static_min_step", "static_max_step", "ideal_per_step", "no_pruning"};
  bool table = false;
  auto* cmp = app.add_subcommand("compare", "run the proposed pipeline and baselines");
  cmp_in.bind(cmp);
  cmp->add_option("--modes", modes, "baselines to run")->delimiter(',');
  cmp->add_flag("--table", table, "print an aligned text table instead of JSON");

  Inputs enum_in;
  auto* enumerate = app.add_subcommand("enumerate", "list candidate CFs, query plans and migration plans");
  enum_in.bind(enumerate, false);

  Inputs prune_in;
  auto* prune = app.add_subcommand("prune", "run the summary tree and report interesting CFs");
  prune_in.bind(prune);

  std::string gen_spec, gen_out;
  auto* gen = app.add_subcommand("gen-workload", "expand pattern generators into a workload document");
  gen->add_option("--spec", gen_spec, "workload with generator entries (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "output path");

  std::string fq, fu, fe, fl, fit_out;
  auto* fit = app.add_subcommand("fit-cost", "fit cost coefficients from latency profiles");
  fit->add_option("--query", fq, "query profile CSV (n, w, s, latency)")->check(CLI::ExistingFile);
  fit->add_option("--update", fu, "update profile CSV (w, latency)")->check(CLI::ExistingFile);
  fit->add_option("--extract", fe, "extract profile CSV (s, latency)")->check(CLI::ExistingFile);
  fit->add_option("--load", fl, "load profile CSV (s, latency)")->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "output path");

  Inputs check_in;
  std::string schedule_path;
  auto* check = app.add_subcommand("check", "verify a schedule against the model");
  check_in.bind(check);
  check->add_option("--schedule", schedule_path, "schedule or report (JSON)")->required()->check(CLI::ExistingFile);

  Inputs lp_in;
  auto* lp = app.add_subcommand("export-lp", "write the full model in CPLEX LP format");
  lp_in.bind(lp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version are successes; anything else is bad input.
    app.exit(e);
    return e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success) ? 0 : 3;
  }

  try {
    if (*optimize) {
      const Problem p = opt_in.load();
      RunOptions o = opt_in.options();
      o.pruning = !no_pruning;
      o.budget_bytes = resolve_budget(p, o);
      const Mode mode = baseline.empty() ? Mode::proposed : *parse_mode(baseline);
      const Report r = run_mode(p, mode, o);
      opt_in.emit(to_json(r, !opt_in.no_timing).dump(2));
      if (!r.schedule.explanation.empty()) std::cerr << "infeasible: " << r.schedule.explanation << '\n';
      return status_exit(r.schedule.status);
    }
    if (*cmp) {
      const Problem p = cmp_in.load();
      std::vector<Mode> ms;
      for (const auto& m : modes) {
        auto parsed = parse_mode(m);
        if (!parsed) throw ValidationError("modes", "unknown mode '" + m + "'");
        ms.push_back(*parsed);
      }
      const Comparison c = compare(p, ms, cmp_in.options());
      cmp_in.emit(table ? render_table(c) : to_json(c, !cmp_in.no_timing).dump(2));
      return ok;
    }
    if (*enumerate) {
      const Problem p = enum_in.load();
      const Instance inst = build_instance(p.graph, p.workload, p.cost);
      nlohmann::json cfs = nlohmann::json::array(), queries = nlohmann::json::array(), migrations = nlohmann::json::array();
      for (const auto& cf : inst.candidates.cfs) cfs.push_back(cf_json(cf));
      for (const auto& q : inst.queries) queries.push_back(to_json(q.plans));
      for (const auto& m : inst.migration_plans) migrations.push_back(to_json(m));
      enum_in.emit(nlohmann::json{{"candidates", cfs},
                                  {"query_plans", queries},
                                  {"migration_plans", migrations},
                                  {"diagnostics", inst.diagnostics}}
                       .dump(2));
      return ok;
    }
    if (*prune) {
      const Problem p = prune_in.load();
      RunOptions o = prune_in.options();
      const Instance inst = build_instance(p.graph, p.workload, p.cost);
      const SubtreeResult tree = get_subtree_cfs(inst, pad_time_steps(p.workload.frequency_matrix()),
                                                 p.workload.interval, {resolve_budget(p, o), o.limits});
      std::vector<std::string> restored;
      const auto keep = prune_candidates(inst, tree.interesting, &restored);
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& n : tree.nodes) nodes.push_back(to_json(n));
      prune_in.emit(nlohmann::json{{"interesting", tree.interesting},
                                   {"kept", keep},
                                   {"restored", restored},
                                   {"nodes", nodes},
                                   {"removed_count", inst.candidates.cfs.size() - keep.size()}}
                        .dump(2));
      return ok;
    }
    if (*gen) {
      const Workload w = workload_from_json(parse_json_document(read_file(gen_spec), "workload spec"));
      w.validate();
      const std::string text = to_json(w).dump(2);
      if (gen_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(gen_out) << text << '\n';
      }
      return ok;
    }
    if (*fit) {
      CostModel m;
      nlohmann::json report = nlohmann::json::object();
      const std::pair<const std::string*, Regression> inputs[] = {
          {&fq, Regression::query}, {&fu, Regression::update}, {&fe, Regression::extract}, {&fl, Regression::load}};
      for (const auto& [path, kind] : inputs) {
        if (path->empty()) continue;
        std::ifstream in(*path);
        const FitResult r = fit_ols(read_profile_csv(in, kind));
        for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
        switch (kind) {
          case Regression::query: m.query = r.coefficients; break;
          case Regression::update: m.update = r.coefficients; break;
          case Regression::extract: m.extract = r.coefficients; break;
          case Regression::load: m.load = r.coefficients; break;
        }
      }
      const std::string text = to_json(m).dump(2);
      if (fit_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream(fit_out) << text << '\n';
      }
      return ok;
    }
    if (*check) {
      const Problem p = check_in.load();
      auto doc = parse_json_document(read_file(schedule_path), "schedule");
      if (doc.contains("schedule")) doc = doc.at("schedule");
      const Schedule s = schedule_from_json(doc);
      std::optional<std::vector<std::string>> keep;
      if (!s.candidates.empty()) keep = s.candidates;
      const Instance inst = build_instance(p.graph, p.workload, p.cost, keep);
      ModelOptions mo;
      mo.storage_budget = check_in.budget ? check_in.budget : s.budget;
      mo.initial_load_cost = check_in.initial_load;
      const IlpModel m = build_model(inst, p.workload.frequency_matrix(), p.workload.interval, mo);
      const VerifyReport v = verify(m, encode(inst, m, s));
      nlohmann::json violations = nlohmann::json::array();
      for (const auto& x : v.violations)
        violations.push_back({{"family", to_string(x.family)}, {"label", x.label}, {"lhs", x.lhs}, {"rhs", x.rhs}});
      check_in.emit(nlohmann::json{{"ok", v.ok()},
                                   {"violations", violations},
                                   {"mismatches", v.mismatches},
                                   {"objective", v.objective},
                                   {"breakdown", {{"workload", v.workload}, {"migration", v.migration}}}}
                        .dump(2));
      return v.ok() ? ok : failure;
    }
    if (*lp) {
      const Problem p = lp_in.load();
      RunOptions o = lp_in.options();
      ModelOptions mo;
      mo.storage_budget = resolve_budget(p, o);
      mo.initial_load_cost = lp_in.initial_load;
      const Instance inst = build_instance(p.graph, p.workload, p.cost);
      lp_in.emit(export_lp(build_model(inst, p.workload.frequency_matrix(), p.workload.interval, mo)));
      return ok;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return invalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return ok;
}

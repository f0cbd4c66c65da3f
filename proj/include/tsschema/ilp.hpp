#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tss {

/// Decision-variable roles. Steps are 1-based; migration variables carry the
/// source step t of the transition t -> t+1.
enum class VarRole { cf_exists, query_uses, mig_extract, mig_load, mig_tree };

/// cf_exists(j,t) | query_uses(i,j,t) | mig_extract(g,o,h,t) | mig_load(g,t) | mig_tree(g,o,t)
struct VarKey {
  VarRole role = VarRole::cf_exists;
  int a = 0, b = 0, c = 0, d = 0;

  auto operator<=>(const VarKey&) const = default;
};

std::string var_name(const VarKey& k);
std::optional<VarKey> parse_var_name(std::string_view name);

enum class Sense { le, eq, ge };

enum class Family {
  migration_link,
  query_precedence,
  query_cover,
  query_exclusion,
  query_existence,
  mig_precedence,
  mig_choice,
  mig_cover,
  mig_exclusion,
  mig_existence,
  storage,
  inherited,
  cost_cap,
  count_cap,
};

std::string to_string(Family f);

struct Term {
  int var = 0;
  double coef = 0;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0;
  Family family = Family::storage;
  std::string label;
  /// Nonnegative-coefficient row whose left side the solver may bound with the
  /// plan-choice structure, like an objective.
  bool structured = false;
};

/// One plan of a choice group. `owned` variables belong to this group alone;
/// `required` are the schema variables the plan needs.
struct ChoiceOption {
  std::vector<int> owned;
  std::vector<int> required;
};

/// Exactly one option is taken when the guard is 1 (or when there is no
/// guard); none otherwise.
struct ChoiceGroup {
  int step = 0;
  int guard = -1;
  std::vector<ChoiceOption> options;
};

struct Bucket {
  bool migration = false;
  int index = 0;  // workload: step-1; migration: transition-1
};

struct IlpModel {
  int time_steps = 1;
  std::vector<VarKey> vars;
  std::vector<Bucket> buckets;
  std::vector<double> storage_weight;  // est_size for cf_exists, 0 otherwise
  Eigen::VectorXd objective;
  std::vector<LinearConstraint> constraints;
  std::optional<double> storage_budget;
  std::vector<ChoiceGroup> groups;
  /// cf_exists variables per step (index step-1).
  std::vector<std::vector<int>> step_schema;

  int add_var(const VarKey& key, double cost, Bucket bucket, double storage = 0);
  int find(const VarKey& key) const;  // -1 when absent
  int at(const VarKey& key) const;    // throws when absent
  void add(LinearConstraint c);
  std::size_t size() const { return vars.size(); }

private:
  std::map<VarKey, int> index_;
};

enum class SolveStatus { optimal, infeasible, budget_exceeded };
std::string to_string(SolveStatus s);

using Assignment = std::vector<std::uint8_t>;

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  Assignment x;
  bool found = false;  // x holds a feasible assignment (possibly of an empty model)
  double objective = 0;
  std::vector<double> workload;   // per step
  std::vector<double> migration;  // per transition
  std::uint64_t nodes = 0;
  double seconds = 0;
  bool has_assignment() const { return found; }
};

double evaluate(const Eigen::VectorXd& c, const Assignment& x);
/// Fills objective and breakdown from the assignment.
void price(const IlpModel& m, Solution& s);

struct Violation {
  Family family;
  std::string label;
  double lhs = 0;
  double rhs = 0;
};

struct VerifyReport {
  std::vector<Violation> violations;
  double objective = 0;
  std::vector<double> workload;
  std::vector<double> migration;
  std::vector<std::string> mismatches;
  bool ok() const { return violations.empty() && mismatches.empty(); }
};

/// Recomputes every constraint and the objective breakdown from scratch and
/// compares them with the solution's reported values (1e-9 relative).
VerifyReport verify(const IlpModel& m, const Solution& s);

std::string export_lp(const IlpModel& m);

struct SolveLimits {
  double time_limit_seconds = 600;
  std::uint64_t node_limit = UINT64_MAX;
};

/// Exact depth-first branch and bound. `incumbent`, if given, must be feasible.
Solution solve(const IlpModel& m, const SolveLimits& limits = {}, const Assignment* incumbent = nullptr);

struct LexicographicTrace {
  Solution phase1;
  Solution phase2;
  Solution phase3;
  double cost_star = 0;
  double count_star = 0;
};

/// Minimise cost, then CF count under cost <= c*(1+1e-9), then storage under
/// both caps. The returned solution is priced with the cost objective.
Solution solve_lexicographic(const IlpModel& m, const SolveLimits& limits = {}, LexicographicTrace* trace = nullptr);

inline constexpr double kLexEpsilon = 1e-9;

} // namespace tss

#include "tsschema/ilp.hpp"

#include "tsschema/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tss {

std::string var_name(const VarKey& k) {
  const std::string t = "_t" + std::to_string(k.role == VarRole::cf_exists || k.role == VarRole::mig_load ? k.b
                                              : k.role == VarRole::mig_extract                              ? k.d
                                                                                                             : k.c);
  switch (k.role) {
  case VarRole::cf_exists: return "x_j" + std::to_string(k.a) + t;
  case VarRole::query_uses: return "y_i" + std::to_string(k.a) + "_j" + std::to_string(k.b) + t;
  case VarRole::mig_extract:
    return "e_g" + std::to_string(k.a) + "_o" + std::to_string(k.b) + "_h" + std::to_string(k.c) + t;
  case VarRole::mig_load: return "l_g" + std::to_string(k.a) + t;
  case VarRole::mig_tree: return "m_g" + std::to_string(k.a) + "_o" + std::to_string(k.b) + t;
  }
  return {};
}

std::optional<VarKey> parse_var_name(std::string_view name) {
  if (name.size() < 2 || name[1] != '_') return std::nullopt;
  VarKey k;
  std::string expect;
  switch (name[0]) {
  case 'x': k.role = VarRole::cf_exists; expect = "jt"; break;
  case 'y': k.role = VarRole::query_uses; expect = "ijt"; break;
  case 'e': k.role = VarRole::mig_extract; expect = "goht"; break;
  case 'l': k.role = VarRole::mig_load; expect = "gt"; break;
  case 'm': k.role = VarRole::mig_tree; expect = "got"; break;
  default: return std::nullopt;
  }
  int* slots[] = {&k.a, &k.b, &k.c, &k.d};
  std::size_t pos = 1;
  for (std::size_t i = 0; i < expect.size(); ++i) {
    if (pos >= name.size() || name[pos] != '_' || pos + 1 >= name.size() || name[pos + 1] != expect[i]) return std::nullopt;
    pos += 2;
    const std::size_t start = pos;
    while (pos < name.size() && std::isdigit(static_cast<unsigned char>(name[pos]))) ++pos;
    if (pos == start) return std::nullopt;
    *slots[i] = std::stoi(std::string(name.substr(start, pos - start)));
  }
  if (pos != name.size()) return std::nullopt;
  return k;
}

std::string to_string(Family f) {
  switch (f) {
  case Family::migration_link: return "migration_link";
  case Family::query_precedence: return "query_precedence";
  case Family::query_cover: return "query_cover";
  case Family::query_exclusion: return "query_exclusion";
  case Family::query_existence: return "query_existence";
  case Family::mig_precedence: return "mig_precedence";
  case Family::mig_choice: return "mig_choice";
  case Family::mig_cover: return "mig_cover";
  case Family::mig_exclusion: return "mig_exclusion";
  case Family::mig_existence: return "mig_existence";
  case Family::storage: return "storage";
  case Family::inherited: return "inherited";
  case Family::cost_cap: return "cost_cap";
  case Family::count_cap: return "count_cap";
  }
  return "?";
}

std::string to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::optimal: return "optimal";
  case SolveStatus::infeasible: return "infeasible";
  case SolveStatus::budget_exceeded: return "budget-exceeded";
  }
  return "?";
}

int IlpModel::add_var(const VarKey& key, double cost, Bucket bucket, double storage) {
  if (index_.count(key)) throw Error("duplicate variable " + var_name(key));
  const int id = static_cast<int>(vars.size());
  vars.push_back(key);
  buckets.push_back(bucket);
  storage_weight.push_back(storage);
  objective.conservativeResize(id + 1);
  objective[id] = cost;
  index_.emplace(key, id);
  return id;
}

int IlpModel::find(const VarKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

int IlpModel::at(const VarKey& key) const {
  const int v = find(key);
  if (v < 0) throw Error("no variable " + var_name(key));
  return v;
}

void IlpModel::add(LinearConstraint c) {
  if (c.terms.empty()) throw Error("constraint '" + c.label + "' has no terms");
  for (const auto& t : c.terms)
    if (t.var < 0 || t.var >= static_cast<int>(vars.size())) throw Error("constraint '" + c.label + "' names an unknown variable");
  constraints.push_back(std::move(c));
}

double evaluate(const Eigen::VectorXd& c, const Assignment& x) {
  double s = 0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (x[static_cast<std::size_t>(i)]) s += c[i];
  return s;
}

void price(const IlpModel& m, Solution& s) {
  s.workload.assign(static_cast<std::size_t>(m.time_steps), 0.0);
  s.migration.assign(static_cast<std::size_t>(std::max(0, m.time_steps - 1)), 0.0);
  if (!s.has_assignment()) return;
  for (std::size_t v = 0; v < m.vars.size(); ++v) {
    if (!s.x[v]) continue;
    const auto& b = m.buckets[v];
    (b.migration ? s.migration : s.workload)[static_cast<std::size_t>(b.index)] += m.objective[static_cast<Eigen::Index>(v)];
  }
  s.objective = evaluate(m.objective, s.x);
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

} // namespace

VerifyReport verify(const IlpModel& m, const Solution& s) {
  VerifyReport r;
  if (s.x.size() != m.vars.size()) {
    r.mismatches.push_back("assignment has " + std::to_string(s.x.size()) + " entries for " +
                           std::to_string(m.vars.size()) + " variables");
    return r;
  }
  for (const auto& c : m.constraints) {
    double lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * (s.x[static_cast<std::size_t>(t.var)] ? 1.0 : 0.0);
    const double tol = 1e-9 * std::max(1.0, std::abs(c.rhs));
    const bool ok = c.sense == Sense::le ? lhs <= c.rhs + tol : c.sense == Sense::ge ? lhs >= c.rhs - tol : std::abs(lhs - c.rhs) <= tol;
    if (!ok) r.violations.push_back({c.family, c.label, lhs, c.rhs});
  }
  r.workload.assign(static_cast<std::size_t>(m.time_steps), 0.0);
  r.migration.assign(static_cast<std::size_t>(std::max(0, m.time_steps - 1)), 0.0);
  for (std::size_t v = 0; v < m.vars.size(); ++v) {
    if (!s.x[v]) continue;
    const double c = m.objective[static_cast<Eigen::Index>(v)];
    r.objective += c;
    const auto& b = m.buckets[v];
    (b.migration ? r.migration : r.workload)[static_cast<std::size_t>(b.index)] += c;
  }
  if (!close(r.objective, s.objective))
    r.mismatches.push_back("objective " + std::to_string(s.objective) + " differs from recomputed " + std::to_string(r.objective));
  auto compare = [&](const std::vector<double>& claimed, const std::vector<double>& actual, const char* what) {
    if (claimed.size() != actual.size()) {
      r.mismatches.push_back(std::string(what) + " breakdown has the wrong length");
      return;
    }
    for (std::size_t i = 0; i < claimed.size(); ++i)
      if (!close(claimed[i], actual[i]))
        r.mismatches.push_back(std::string(what) + " breakdown diverges at " + std::to_string(i + 1) + ": " +
                               std::to_string(claimed[i]) + " vs " + std::to_string(actual[i]));
  };
  compare(s.workload, r.workload, "workload");
  compare(s.migration, r.migration, "migration");
  return r;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_expression(std::ostringstream& out, const std::vector<Term>& terms, const IlpModel& m) {
  std::size_t on_line = 0;
  bool first = true;
  for (const auto& t : terms) {
    if (t.coef == 0) continue;
    out << (t.coef < 0 ? " - " : first ? " " : " + ") << number(std::abs(t.coef)) << " "
        << var_name(m.vars[static_cast<std::size_t>(t.var)]);
    first = false;
    if (++on_line % 8 == 0) out << "\n   ";
  }
  if (first) out << " 0";
}

} // namespace

std::string export_lp(const IlpModel& m) {
  std::ostringstream out;
  out << "\\ time-dependent schema model, " << m.vars.size() << " binaries, " << m.constraints.size() << " rows\n";
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (std::size_t v = 0; v < m.vars.size(); ++v) obj.push_back({static_cast<int>(v), m.objective[static_cast<Eigen::Index>(v)]});
  write_expression(out, obj, m);
  out << "\nSubject To\n";
  for (std::size_t i = 0; i < m.constraints.size(); ++i) {
    const auto& c = m.constraints[i];
    out << " c" << i << "_" << to_string(c.family) << ":";
    write_expression(out, c.terms, m);
    out << (c.sense == Sense::le ? " <= " : c.sense == Sense::ge ? " >= " : " = ") << number(c.rhs) << "\n";
  }
  out << "Binaries\n";
  for (std::size_t v = 0; v < m.vars.size(); ++v) out << " " << var_name(m.vars[v]) << "\n";
  out << "End\n";
  return out.str();
}

} // namespace tss

#include "tsschema/ilp.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

namespace tss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-9;

double row_tol(double rhs) { return kFeasTol * std::max(1.0, std::abs(rhs)); }

class Search {
public:
  Search(const IlpModel& m, const SolveLimits& limits) : m_(m), limits_(limits), n_(static_cast<int>(m.size())) {
    c_.resize(static_cast<std::size_t>(n_));
    for (int v = 0; v < n_; ++v) {
      c_[static_cast<std::size_t>(v)] = m.objective[v];
      if (c_[static_cast<std::size_t>(v)] < 0) throw Error("solver requires a non-negative objective");
    }
    val_.assign(static_cast<std::size_t>(n_), -1);
    cols_.resize(static_cast<std::size_t>(n_));
    for (std::size_t r = 0; r < m.constraints.size(); ++r) {
      const auto& c = m.constraints[r];
      Row row;
      row.sense = c.sense;
      row.rhs = c.rhs;
      for (const auto& t : c.terms) {
        if (t.coef == 0) continue;
        row.terms.push_back(t);
        row.maxabs = std::max(row.maxabs, std::abs(t.coef));
        cols_[static_cast<std::size_t>(t.var)].push_back({static_cast<int>(r), t.coef});
        if (t.coef > 0)
          row.hi += t.coef;
        else
          row.lo += t.coef;
      }
      if (c.structured) {
        std::vector<double> w(static_cast<std::size_t>(n_), 0.0);
        for (const auto& t : row.terms) {
          if (t.coef < 0) throw Error("structured row '" + c.label + "' has a negative coefficient");
          w[static_cast<std::size_t>(t.var)] += t.coef;
        }
        row.bound_id = static_cast<int>(weights_.size()) + 1;
        weights_.push_back(std::move(w));
        structured_.push_back(static_cast<int>(r));
      }
      rows_.push_back(std::move(row));
    }
    queued_.assign(rows_.size(), 0);

    // Branching order: costliest first under the first structured row (the
    // earlier phase's objective), then under the objective, ties by index.
    order_.resize(static_cast<std::size_t>(n_));
    std::iota(order_.begin(), order_.end(), 0);
    const std::vector<double> none(static_cast<std::size_t>(n_), 0.0);
    const std::vector<double>& primary = weights_.empty() ? none : weights_.front();
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
      if (primary[ia] != primary[ib]) return primary[ia] > primary[ib];
      return c_[ia] > c_[ib];
    });

    const int T = m.time_steps;
    step_of_.assign(static_cast<std::size_t>(n_), -1);
    step_groups_.resize(static_cast<std::size_t>(T));
    for (std::size_t g = 0; g < m.groups.size(); ++g) {
      const auto& grp = m.groups[g];
      if (grp.guard >= 0) {
        guarded_.push_back(static_cast<int>(g));
        continue;
      }
      if (grp.step < 1 || grp.step > T) throw Error("choice group outside the time horizon");
      step_groups_[static_cast<std::size_t>(grp.step - 1)].push_back(static_cast<int>(g));
      for (const auto& o : grp.options) {
        for (int v : o.owned) step_of_[static_cast<std::size_t>(v)] = grp.step - 1;
        for (int v : o.required) step_of_[static_cast<std::size_t>(v)] = grp.step - 1;
      }
    }
    for (std::size_t t = 0; t < m.step_schema.size(); ++t)
      for (int v : m.step_schema[t]) step_of_[static_cast<std::size_t>(v)] = static_cast<int>(t);
    std::mt19937_64 rng(0x5eed);
    zobrist_.resize(static_cast<std::size_t>(n_) * 2);
    for (auto& z : zobrist_) z = rng();
    step_hash_.assign(static_cast<std::size_t>(T), 0);
    step_storage_.assign(static_cast<std::size_t>(T), 0.0);
    cache_.resize(static_cast<std::size_t>(T) * (weights_.size() + 1));
    union_count_.assign(static_cast<std::size_t>(n_), 0);
    budget_ = m.storage_budget ? *m.storage_budget : kInf;
  }

  Solution run(const Assignment* incumbent) {
    start_ = std::chrono::steady_clock::now();
    if (incumbent) {
      if (incumbent->size() != static_cast<std::size_t>(n_)) throw Error("incumbent size mismatch");
      best_ = *incumbent;
      best_cost_ = evaluate(m_.objective, best_);
      has_best_ = true;
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) enqueue(static_cast<int>(r));
    if (propagate()) dfs();
    Solution s;
    s.nodes = nodes_;
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (has_best_) {
      s.x = best_;
      s.found = true;
      s.status = stopped_ ? SolveStatus::budget_exceeded : SolveStatus::optimal;
    } else {
      s.status = stopped_ ? SolveStatus::budget_exceeded : SolveStatus::infeasible;
    }
    price(m_, s);
    return s;
  }

private:
  struct Row {
    std::vector<Term> terms;
    Sense sense = Sense::le;
    double rhs = 0;
    double lo = 0;  // minimum activity given fixings
    double hi = 0;  // maximum activity given fixings
    double maxabs = 0;
    int bound_id = 0;
  };

  const IlpModel& m_;
  SolveLimits limits_;
  int n_;
  std::vector<double> c_;
  std::vector<Row> rows_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<std::vector<double>> weights_;  // bound vectors of structured rows
  std::vector<int> structured_;
  std::vector<std::int8_t> val_;
  std::vector<int> trail_;
  std::vector<int> queue_;
  std::vector<char> queued_;
  std::vector<int> order_;
  double fixed_cost_ = 0;

  std::vector<int> step_of_;
  std::vector<std::vector<int>> step_groups_;
  std::vector<int> guarded_;
  std::vector<std::uint64_t> zobrist_;
  std::vector<std::uint64_t> step_hash_;
  std::vector<double> step_storage_;
  std::vector<std::unordered_map<std::uint64_t, double>> cache_;
  std::vector<int> union_count_;
  double budget_ = kInf;

  Assignment best_;
  double best_cost_ = kInf;
  bool has_best_ = false;
  std::uint64_t nodes_ = 0;
  bool stopped_ = false;
  std::chrono::steady_clock::time_point start_;

  std::int8_t value(int v) const { return val_[static_cast<std::size_t>(v)]; }

  void enqueue(int r) {
    if (!queued_[static_cast<std::size_t>(r)]) {
      queued_[static_cast<std::size_t>(r)] = 1;
      queue_.push_back(r);
    }
  }

  void apply(int v, int x, int sign) {
    for (const auto& [r, a] : cols_[static_cast<std::size_t>(v)]) {
      Row& row = rows_[static_cast<std::size_t>(r)];
      if (a > 0) {
        if (x)
          row.lo += sign * a;
        else
          row.hi -= sign * a;
      } else {
        if (x)
          row.hi += sign * a;
        else
          row.lo -= sign * a;
      }
      if (sign > 0) enqueue(r);
    }
    const int t = step_of_[static_cast<std::size_t>(v)];
    if (t >= 0) {
      step_hash_[static_cast<std::size_t>(t)] ^= zobrist_[static_cast<std::size_t>(v) * 2 + static_cast<std::size_t>(x)];
      if (x) step_storage_[static_cast<std::size_t>(t)] += sign * m_.storage_weight[static_cast<std::size_t>(v)];
    }
    if (x) fixed_cost_ += sign * c_[static_cast<std::size_t>(v)];
  }

  void assign(int v, int x) {
    val_[static_cast<std::size_t>(v)] = static_cast<std::int8_t>(x);
    trail_.push_back(v);
    apply(v, x, +1);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const int v = trail_.back();
      trail_.pop_back();
      apply(v, value(v), -1);
      val_[static_cast<std::size_t>(v)] = -1;
    }
    for (int r : queue_) queued_[static_cast<std::size_t>(r)] = 0;
    queue_.clear();
  }

  bool propagate() {
    while (!queue_.empty()) {
      const int r = queue_.back();
      queue_.pop_back();
      queued_[static_cast<std::size_t>(r)] = 0;
      if (!propagate_row(r)) {
        for (int q : queue_) queued_[static_cast<std::size_t>(q)] = 0;
        queue_.clear();
        return false;
      }
    }
    return true;
  }

  bool propagate_row(int r) {
    const Row& row = rows_[static_cast<std::size_t>(r)];
    const double tol = row_tol(row.rhs);
    if (row.sense != Sense::ge) {
      if (row.lo > row.rhs + tol) return false;
      const double slack = row.rhs - row.lo;
      if (slack + tol < row.maxabs) {
        for (const auto& t : row.terms) {
          if (value(t.var) >= 0) continue;
          if (t.coef > 0 && t.coef > slack + tol)
            assign(t.var, 0);
          else if (t.coef < 0 && -t.coef > slack + tol)
            assign(t.var, 1);
        }
      }
    }
    if (row.sense != Sense::le) {
      const Row& cur = rows_[static_cast<std::size_t>(r)];
      if (cur.hi < cur.rhs - tol) return false;
      const double slack = cur.hi - cur.rhs;
      if (slack + tol < cur.maxabs) {
        for (const auto& t : cur.terms) {
          if (value(t.var) >= 0) continue;
          if (t.coef > 0 && t.coef > slack + tol)
            assign(t.var, 1);
          else if (t.coef < 0 && -t.coef > slack + tol)
            assign(t.var, 0);
        }
      }
    }
    return true;
  }

  bool alive(const ChoiceOption& o) const {
    for (int v : o.owned)
      if (value(v) == 0) return false;
    for (int v : o.required)
      if (value(v) == 0) return false;
    return true;
  }

  double own_cost(const ChoiceOption& o, const std::vector<double>& w) const {
    double s = 0;
    for (int v : o.owned)
      if (value(v) < 0) s += w[static_cast<std::size_t>(v)];
    return s;
  }

  struct Opt {
    double own;
    std::vector<int> req;
  };

  double step_bound(int t, const std::vector<double>& w, int bound_id) {
    auto& cache = cache_[static_cast<std::size_t>(t) * (weights_.size() + 1) + static_cast<std::size_t>(bound_id)];
    const std::uint64_t key = step_hash_[static_cast<std::size_t>(t)];
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    if (cache.size() > 200000) cache.clear();

    std::vector<std::vector<Opt>> groups;
    for (int g : step_groups_[static_cast<std::size_t>(t)]) {
      std::vector<Opt> opts;
      for (const auto& o : m_.groups[static_cast<std::size_t>(g)].options) {
        if (!alive(o)) continue;
        Opt x{own_cost(o, w), {}};
        for (int v : o.required)
          if (value(v) < 0) x.req.push_back(v);
        opts.push_back(std::move(x));
      }
      if (opts.empty()) return cache[key] = kInf;
      std::stable_sort(opts.begin(), opts.end(), [](const Opt& a, const Opt& b) { return a.own < b.own; });
      groups.push_back(std::move(opts));
    }
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::vector<double> suffix(groups.size() + 1, 0.0);
    for (std::size_t k = groups.size(); k-- > 0;) suffix[k] = suffix[k + 1] + groups[k].front().own;

    double best = kInf;
    long work = 20000;
    bool aborted = false;
    const double base_storage = step_storage_[static_cast<std::size_t>(t)];
    const double cap = budget_ + row_tol(budget_ == kInf ? 1.0 : budget_);
    auto rec = [&](auto&& self, std::size_t k, double cost, double storage) -> void {
      if (aborted || cost + suffix[k] >= best) return;
      if (k == groups.size()) {
        best = cost;
        return;
      }
      for (const auto& o : groups[k]) {
        if (--work < 0) {
          aborted = true;
          return;
        }
        double nc = cost + o.own, ns = storage;
        for (int v : o.req)
          if (union_count_[static_cast<std::size_t>(v)]++ == 0) {
            nc += w[static_cast<std::size_t>(v)];
            ns += m_.storage_weight[static_cast<std::size_t>(v)];
          }
        if (base_storage + ns <= cap) self(self, k + 1, nc, ns);
        for (int v : o.req) --union_count_[static_cast<std::size_t>(v)];
        if (aborted) return;
      }
    };
    rec(rec, 0, 0.0, 0.0);
    const double result = aborted ? suffix[0] : best;
    return cache[key] = result;
  }

  /// Lower bound on sum(w * x) over completions of the current fixing.
  double lower_bound(const std::vector<double>& w, double fixed, int bound_id) {
    double lb = fixed;
    for (std::size_t t = 0; t < step_groups_.size(); ++t) {
      if (step_groups_[t].empty()) continue;
      lb += step_bound(static_cast<int>(t), w, bound_id);
      if (lb == kInf) return kInf;
    }
    for (int g : guarded_) {
      const auto& grp = m_.groups[static_cast<std::size_t>(g)];
      if (value(grp.guard) != 1) continue;
      double best = kInf;
      for (const auto& o : grp.options)
        if (alive(o)) best = std::min(best, own_cost(o, w));
      if (best == kInf) return kInf;
      lb += best;
    }
    return lb;
  }

  bool prune() {
    const double lb = lower_bound(c_, fixed_cost_, 0);
    if (lb == kInf) return true;
    if (!best_.empty() && lb >= best_cost_ - 1e-12 * std::max(1.0, std::abs(best_cost_))) return true;
    for (int r : structured_) {
      const Row& row = rows_[static_cast<std::size_t>(r)];
      const double b = lower_bound(weights_[static_cast<std::size_t>(row.bound_id - 1)], row.lo, row.bound_id);
      if (b > row.rhs + row_tol(row.rhs)) return true;
    }
    return false;
  }

  int pick() const {
    for (int v : order_)
      if (value(v) < 0) return v;
    return -1;
  }

  bool out_of_budget() {
    if (stopped_) return true;
    if (nodes_ >= limits_.node_limit) return stopped_ = true;
    if ((nodes_ & 255) == 0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > limits_.time_limit_seconds) return stopped_ = true;
    }
    return false;
  }

  void dfs() {
    ++nodes_;
    if (out_of_budget()) return;
    if (prune()) return;
    const int v = pick();
    if (v < 0) {
      Assignment x(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(value(i));
      const double cost = evaluate(m_.objective, x);
      if (!has_best_ || cost < best_cost_) {
        best_ = std::move(x);
        best_cost_ = cost;
        has_best_ = true;
      }
      return;
    }
    for (int x = 0; x <= 1; ++x) {
      const std::size_t mark = trail_.size();
      assign(v, x);
      if (propagate()) dfs();
      undo(mark);
      if (stopped_) return;
    }
  }
};

} // namespace

Solution solve(const IlpModel& m, const SolveLimits& limits, const Assignment* incumbent) {
  Search s(m, limits);
  return s.run(incumbent);
}

Solution solve_lexicographic(const IlpModel& m, const SolveLimits& limits, LexicographicTrace* trace) {
  const auto start = std::chrono::steady_clock::now();
  auto remaining = [&] {
    SolveLimits l = limits;
    l.time_limit_seconds -= std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    l.time_limit_seconds = std::max(l.time_limit_seconds, 0.0);
    return l;
  };
  Solution p1 = solve(m, limits);
  if (trace) trace->phase1 = p1;
  if (!p1.has_assignment()) return p1;
  const double cstar = p1.objective;

  IlpModel m2 = m;
  LinearConstraint cap;
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m.objective[static_cast<Eigen::Index>(v)] != 0) cap.terms.push_back({static_cast<int>(v), m.objective[static_cast<Eigen::Index>(v)]});
  cap.sense = Sense::le;
  cap.rhs = cstar * (1 + kLexEpsilon) + 1e-12;
  cap.family = Family::cost_cap;
  cap.label = "cost_cap";
  cap.structured = true;
  if (!cap.terms.empty()) m2.add(cap);
  LinearConstraint count;
  count.sense = Sense::le;
  count.family = Family::count_cap;
  count.label = "count_cap";
  count.structured = true;
  Eigen::VectorXd count_obj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.size()));
  for (std::size_t v = 0; v < m.size(); ++v)
    if (m.vars[v].role == VarRole::cf_exists) {
      count_obj[static_cast<Eigen::Index>(v)] = 1;
      count.terms.push_back({static_cast<int>(v), 1.0});
    }
  m2.objective = count_obj;
  Solution p2 = solve(m2, remaining(), &p1.x);
  if (trace) trace->phase2 = p2;
  const double nstar = evaluate(count_obj, p2.x);

  IlpModel m3 = m2;
  if (!count.terms.empty()) {
    count.rhs = nstar + 0.5;
    m3.add(count);
  }
  Eigen::VectorXd size_obj = Eigen::Map<const Eigen::VectorXd>(m.storage_weight.data(), static_cast<Eigen::Index>(m.size()));
  m3.objective = size_obj;
  Solution p3 = solve(m3, remaining(), &p2.x);
  if (trace) {
    trace->phase3 = p3;
    trace->cost_star = cstar;
    trace->count_star = nstar;
  }
  Solution out;
  out.x = p3.x;
  out.found = p3.found;
  out.nodes = p1.nodes + p2.nodes + p3.nodes;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool exact = p1.status == SolveStatus::optimal && p2.status == SolveStatus::optimal && p3.status == SolveStatus::optimal;
  out.status = exact ? SolveStatus::optimal : SolveStatus::budget_exceeded;
  price(m, out);
  return out;
}

} // namespace tss

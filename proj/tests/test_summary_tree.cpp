#include "support.hpp"

#include "tsschema/error.hpp"

#include <doctest.h>

#include <set>
#include <tuple>

using namespace tss;

namespace {

Problem two_group(int T) {
  return test::load_problem("two_group_schema.json", T == 6 ? "two_group_t6_workload.json" : "two_group_t12_workload.json");
}

std::vector<std::tuple<int, int, int>> steps_of(const std::vector<SummaryNode>& nodes) {
  std::vector<std::tuple<int, int, int>> out;
  for (const auto& n : nodes) out.emplace_back(n.min_ts, n.mid_ts, n.max_ts);
  return out;
}

} // namespace

TEST_CASE("padding repeats the last step up to a power of two") {
  Eigen::MatrixXd f(2, 3);
  f << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd p = pad_time_steps(f);
  REQUIRE(p.cols() == 4);
  CHECK(p(0, 3) == 3);
  CHECK(p(1, 3) == 6);
  CHECK(p.leftCols(3) == f);
  Eigen::MatrixXd eight = Eigen::MatrixXd::Ones(1, 8);
  CHECK(pad_time_steps(eight).cols() == 8);
  CHECK_THROWS_AS(pad_time_steps(Eigen::MatrixXd::Ones(1, 1)), Error);
}

TEST_CASE("node frequencies pick the three steps") {
  Eigen::MatrixXd f(1, 8);
  f << 1, 2, 3, 4, 5, 6, 7, 8;
  const Eigen::MatrixXd n = node_frequencies(f, 1, 4, 8);
  CHECK(n(0, 0) == 1);
  CHECK(n(0, 1) == 4);
  CHECK(n(0, 2) == 8);
}

TEST_CASE("translate_to_const pins every candidate at the listed steps") {
  const FixingMap m = translate_to_const(3, {{1, {0, 2}}, {4, {}}});
  CHECK(m.size() == 6);
  CHECK(m.at({1, 0}));
  CHECK_FALSE(m.at({1, 1}));
  CHECK(m.at({1, 2}));
  CHECK_FALSE(m.at({4, 0}));
}

TEST_CASE("tree shape for eight steps") {
  const Problem p = two_group(12);
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  const Eigen::MatrixXd f = p.workload.frequency_matrix().leftCols(8);
  const SubtreeResult r = get_subtree_cfs(inst, f, p.workload.interval, {});
  using S = std::tuple<int, int, int>;
  CHECK(steps_of(r.nodes) == std::vector<S>{{1, 4, 8}, {1, 2, 4}, {2, 3, 4}, {4, 6, 8}, {4, 5, 6}, {6, 7, 8}});
  const std::size_t n = inst.candidates.cfs.size();
  CHECK(r.nodes[0].inherited == 0);
  CHECK(r.nodes[1].inherited == 3 * n);  // steps 1, 4, 8
  CHECK(r.nodes[2].inherited == 4 * n);  // plus step 2
  CHECK(r.nodes[3].inherited == 3 * n);
  for (const auto& node : r.nodes) CHECK(node.status == SolveStatus::optimal);
}

TEST_CASE("solve count is T-2 for powers of two") {
  const Problem p = two_group(12);
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  for (int T : {4, 8, 16}) {
    Eigen::MatrixXd f(p.workload.frequency_matrix().rows(), T);
    for (int t = 0; t < T; ++t) f.col(t) = p.workload.frequency_matrix().col(t % 12);
    CHECK(get_subtree_cfs(inst, f, p.workload.interval, {}).nodes.size() == static_cast<std::size_t>(T - 2));
  }
}

TEST_CASE("two steps solve the root alone") {
  const Problem p = test::user_item();
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  const SubtreeResult r = get_subtree_cfs(inst, p.workload.frequency_matrix(), p.workload.interval, {});
  REQUIRE(r.nodes.size() == 1);
  CHECK(std::make_tuple(r.nodes[0].min_ts, r.nodes[0].mid_ts, r.nodes[0].max_ts) == std::make_tuple(1, 1, 2));
  CHECK_FALSE(r.interesting.empty());
}

TEST_CASE("constant workload picks the same CFs at every node") {
  const Problem p = two_group(12);
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  Eigen::MatrixXd f(p.workload.frequency_matrix().rows(), 8);
  for (int t = 0; t < 8; ++t) f.col(t) = p.workload.frequency_matrix().col(0);
  const SubtreeResult r = get_subtree_cfs(inst, f, p.workload.interval, {});
  for (const auto& node : r.nodes) {
    CHECK(node.chosen == r.nodes[0].chosen);
    CHECK_FALSE(node.infeasible_fallback);
  }
  CHECK(r.interesting == r.nodes[0].chosen);
}

TEST_CASE("pruning keeps interesting CFs and restores a plan per query") {
  const Problem p = two_group(6);
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  std::vector<std::string> all;
  for (const auto& cf : inst.candidates.cfs) all.push_back(cf.id);
  std::vector<std::string> restored;
  CHECK(prune_candidates(inst, all, &restored) == all);
  CHECK(restored.empty());

  const std::vector<std::string> keep = prune_candidates(inst, {}, &restored);
  CHECK_FALSE(restored.empty());
  CHECK(keep == restored);
  const std::set<std::string> kept(keep.begin(), keep.end());
  for (const auto& q : inst.queries) {
    bool covered = false;
    for (const auto& plan : q.coverage.plans) {
      bool all_in = true;
      for (std::size_t k : plan) all_in = all_in && kept.count(q.coverage.cfs[k]);
      covered = covered || all_in;
    }
    CHECK(covered);
  }
}

TEST_CASE("unsatisfiable inherited fixings fall back") {
  // A budget too small for the parent's three-step schema still leaves each
  // child solvable once the zero fixings are dropped.
  const Problem p = two_group(12);
  const Instance inst = build_instance(p.graph, p.workload, p.cost);
  TreeOptions opts;
  opts.storage_budget = 1.0;
  const SubtreeResult r = get_subtree_cfs(inst, p.workload.frequency_matrix().leftCols(4), p.workload.interval, opts);
  REQUIRE(r.nodes.size() == 2);
  CHECK(r.nodes[0].status == SolveStatus::infeasible);
  CHECK(r.interesting.empty());
}

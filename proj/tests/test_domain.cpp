#include "support.hpp"

#include "tsschema/error.hpp"

#include <doctest.h>

#include <functional>

using namespace tss;

namespace {

std::string workload_doc(const std::string& freqs, int T = 2) {
  return R"({"time_steps": )" + std::to_string(T) + R"(, "interval_seconds": 60,
    "statements": [
      {"id": "q1", "kind": "query", "text": "SELECT user.name FROM user.item WHERE item.name = ?"},
      {"id": "q2", "kind": "query", "text": "SELECT user.name FROM user.item WHERE item.quantity = ?"}],
    "frequencies": )" + freqs + "}";
}

std::string path_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<no error>";
}

} // namespace

TEST_CASE("user_item fixture loads with two entities, one edge and two statements") {
  const Problem p = test::user_item();
  CHECK(p.graph.entities().size() == 2);
  CHECK(p.graph.edges().size() == 1);
  CHECK(p.workload.statements.size() == 2);
  CHECK(p.graph.join_key(0).str() == "user.id");
}

TEST_CASE("workload validation names the offending statement") {
  const std::string schema = read_file(test::fixture("user_item_schema.json"));
  CHECK(path_of([&] { load_domain(schema, workload_doc(R"({"q1": [1, 2]})")); }).find("q2") != std::string::npos);
  const std::string msg = [&] {
    try {
      load_domain(schema, workload_doc(R"({"q1": [1, 2, 3], "q2": [1, 2, 3, 4]})", 4));
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  }();
  CHECK(msg.find("q1") != std::string::npos);
  CHECK_THROWS_AS(load_domain(schema, "{not json"), ValidationError);
}

TEST_CASE("schema validation rejects dangling edges and bad keys") {
  CHECK_THROWS_AS(EntityGraph({Entity{"a", 10, {{"id", 10, 8}}, "id"}}, {Relationship{"a", "b", "a_id"}}), ValidationError);
  CHECK_THROWS_AS(EntityGraph({Entity{"a", 10, {{"id", 5, 8}}, "id"}}, {}), ValidationError);
  CHECK_THROWS_AS(EntityGraph({Entity{"a", 10, {{"id", 10, 8}}, "key"}}, {}), ValidationError);
}

TEST_CASE("query text errors are reported against the statement") {
  const std::string schema = read_file(test::fixture("user_item_schema.json"));
  const std::string bad = R"({"time_steps": 1, "statements": [
      {"id": "q1", "kind": "query", "text": "SELECT user.name FROM user WHERE user.name > ?"}],
    "frequencies": {"q1": [1]}})";
  CHECK(path_of([&] { load_domain(schema, bad); }) == "statements[0].text");
}

TEST_CASE("frequency generators") {
  CHECK(gen_frequency(Linear{10, 0}, 4) == FrequencySeries{10, 10, 10, 10});
  const auto p = gen_frequency(Periodical{100, 1, 4, 0}, 4);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == doctest::Approx(100));
  CHECK(p[1] == doctest::Approx(200));
  CHECK(p[2] == doctest::Approx(100));
  CHECK(p[3] == doctest::Approx(0).epsilon(1e-12));
  CHECK(gen_frequency(Spike{5, 3, 9, 1}, 5) == FrequencySeries{5, 5, 50, 5, 5});
  CHECK(gen_frequency(Linear{3, -2}, 4) == FrequencySeries{3, 1, 0, 0});
  CHECK_THROWS_AS(gen_frequency(Linear{1, 0}, 0), ValidationError);
  CHECK_THROWS_AS(gen_frequency(Spike{1, 9, 1, 1}, 4), ValidationError);
}

TEST_CASE("generated series always have length T and no negative entries") {
  for (int T = 1; T <= 9; ++T)
    for (double amp : {0.0, 0.5, 1.0, 3.0})
      for (double phase : {0.0, 1.0, 3.14}) {
        const auto s = gen_frequency(Periodical{7, amp, 3, phase}, T);
        CHECK(static_cast<int>(s.size()) == T);
        for (double v : s) CHECK(v >= 0);
      }
}

TEST_CASE("summarize_frequencies") {
  Workload w;
  w.statements = {{"a", StatementKind::query, "x"}, {"b", StatementKind::query, "y"}};
  w.frequencies = {{"a", {2, 4, 6}}, {"b", {1, 1, 4}}};
  w.time_steps = 3;
  const Workload avg = summarize_frequencies(w, Average{});
  CHECK(avg.time_steps == 1);
  CHECK(avg.frequencies.at("a") == FrequencySeries{4});
  CHECK(avg.frequencies.at("b") == FrequencySeries{2});
  CHECK(summarize_frequencies(w, AtStep{3}).frequencies.at("a") == FrequencySeries{6});
  CHECK_THROWS_AS(summarize_frequencies(w, AtStep{4}), ValidationError);

  Workload scaled = w;
  for (auto& [id, s] : scaled.frequencies)
    for (double& v : s) v *= 2.5;
  const Workload savg = summarize_frequencies(scaled, Average{});
  for (const auto& [id, s] : avg.frequencies) CHECK(savg.frequencies.at(id)[0] == doctest::Approx(2.5 * s[0]));
}

TEST_CASE("serialize then load yields an equal model") {
  const Problem p = test::load_problem("two_group_schema.json", "two_group_t12_workload.json");
  CHECK(schema_from_json(to_json(p.graph)) == p.graph);
  CHECK(workload_from_json(to_json(p.workload)) == p.workload);
  const auto m = p.workload.frequency_matrix();
  CHECK(m.rows() == static_cast<Eigen::Index>(p.workload.statements.size()));
  CHECK(m.cols() == 12);
}

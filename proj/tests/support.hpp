#pragma once

#include "tsschema/domain_io.hpp"
#include "tsschema/pipeline.hpp"

#include <string>

namespace tss::test {

inline std::string fixture(const std::string& name) { return std::string(TSS_FIXTURES) + "/" + name; }

inline Problem load_problem(const std::string& schema, const std::string& workload) {
  auto [g, w] = load_domain(read_file(fixture(schema)), read_file(fixture(workload)));
  return {std::move(g), std::move(w), CostModel{}};
}

inline Problem user_item() { return load_problem("user_item_schema.json", "user_item_workload.json"); }
inline Problem chain() { return load_problem("chain_schema.json", "chain_workload.json"); }

/// Same problem with every series cut or repeated cyclically to T steps.
inline Problem with_steps(Problem p, int T) {
  Workload& w = p.workload;
  for (auto& [id, s] : w.frequencies) {
    FrequencySeries out(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) out[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t % static_cast<int>(s.size()))];
    s = out;
  }
  w.time_steps = T;
  return p;
}

inline IlpModel model_for(const Problem& p, const Instance& inst, std::optional<double> budget = std::nullopt) {
  ModelOptions mo;
  mo.storage_budget = budget;
  return build_model(inst, p.workload.frequency_matrix(), p.workload.interval, mo);
}

/// Rebuilds the model a schedule came from and checks it, as `check` does.
inline VerifyReport check_schedule(const Problem& p, const Schedule& s) {
  std::optional<std::vector<std::string>> keep;
  if (!s.candidates.empty()) keep = s.candidates;
  const Instance inst = build_instance(p.graph, p.workload, p.cost, keep);
  ModelOptions mo;
  mo.storage_budget = s.budget;
  const IlpModel m = build_model(inst, p.workload.frequency_matrix(), p.workload.interval, mo);
  return verify(m, encode(inst, m, s));
}

} // namespace tss::test

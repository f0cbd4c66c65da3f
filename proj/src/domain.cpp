#include "tsschema/domain.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace tss {

const Attribute* Entity::find(std::string_view attribute) const {
  for (const auto& a : attributes)
    if (a.name == attribute) return &a;
  return nullptr;
}

EntityGraph::EntityGraph(std::vector<Entity> entities, std::vector<Relationship> edges)
    : entities_(std::move(entities)), edges_(std::move(edges)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < entities_.size(); ++i) {
    const auto& e = entities_[i];
    const std::string path = "entities[" + std::to_string(i) + "]";
    if (e.name.empty()) throw ValidationError(path + ".name", "empty entity name");
    if (!names.insert(e.name).second) throw ValidationError(path + ".name", "duplicate entity '" + e.name + "'");
    if (e.record_count < 1) throw ValidationError(path + ".record_count", "must be positive");
    std::set<std::string> attrs;
    for (std::size_t k = 0; k < e.attributes.size(); ++k) {
      const auto& a = e.attributes[k];
      const std::string apath = path + ".attributes[" + std::to_string(k) + "]";
      if (!attrs.insert(a.name).second) throw ValidationError(apath + ".name", "duplicate attribute '" + a.name + "'");
      if (a.cardinality < 1) throw ValidationError(apath + ".cardinality", "must be at least 1");
      if (a.field_size < 1) throw ValidationError(apath + ".field_size", "must be at least 1");
      if (a.cardinality > e.record_count)
        throw ValidationError(apath + ".cardinality", "exceeds record_count of '" + e.name + "'");
    }
    const Attribute* pk = e.find(e.primary_key);
    if (!pk) throw ValidationError(path + ".primary_key", "unknown attribute '" + e.primary_key + "'");
    if (pk->cardinality != e.record_count)
      throw ValidationError(path + ".primary_key", "key cardinality must equal record_count");
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& r = edges_[i];
    const std::string path = "edges[" + std::to_string(i) + "]";
    if (!find(r.from)) throw ValidationError(path + ".from", "unknown entity '" + r.from + "'");
    const Entity* many = find(r.to);
    if (!many) throw ValidationError(path + ".to", "unknown entity '" + r.to + "'");
    if (r.from == r.to) throw ValidationError(path, "self edges are not supported");
    if (!many->find(r.fk_attribute))
      throw ValidationError(path + ".fk_attribute", "'" + r.fk_attribute + "' not an attribute of '" + r.to + "'");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = edges_[j];
      if ((o.from == r.from && o.to == r.to) || (o.from == r.to && o.to == r.from))
        throw ValidationError(path, "parallel edges between '" + r.from + "' and '" + r.to + "'");
    }
  }
}

const Entity* EntityGraph::find(std::string_view entity) const {
  for (const auto& e : entities_)
    if (e.name == entity) return &e;
  return nullptr;
}

const Entity& EntityGraph::entity(std::string_view name) const {
  const Entity* e = find(name);
  if (!e) throw ValidationError("", "unknown entity '" + std::string(name) + "'");
  return *e;
}

const Attribute* EntityGraph::find(const AttrRef& ref) const {
  const Entity* e = find(ref.entity);
  return e ? e->find(ref.name) : nullptr;
}

const Attribute& EntityGraph::attribute(const AttrRef& ref) const {
  const Attribute* a = find(ref);
  if (!a) throw ValidationError("", "unknown attribute '" + ref.str() + "'");
  return *a;
}

AttrRef EntityGraph::key_of(std::string_view entity) const {
  return {std::string(entity), this->entity(entity).primary_key};
}

std::optional<std::size_t> EntityGraph::edge_between(std::string_view a, std::string_view b) const {
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& r = edges_[i];
    if ((r.from == a && r.to == b) || (r.from == b && r.to == a)) return i;
  }
  return std::nullopt;
}

AttrRef EntityGraph::join_key(std::size_t edge) const { return key_of(edges_.at(edge).from); }

void Workload::validate() const {
  if (time_steps < 1) throw ValidationError("time_steps", "must be at least 1");
  if (!(interval > 0)) throw ValidationError("interval_seconds", "must be positive");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const auto& s = statements[i];
    const std::string path = "statements[" + std::to_string(i) + "]";
    if (s.id.empty()) throw ValidationError(path + ".id", "empty statement id");
    if (!ids.insert(s.id).second) throw ValidationError(path + ".id", "duplicate statement id '" + s.id + "'");
    auto it = frequencies.find(s.id);
    if (it == frequencies.end())
      throw ValidationError("frequencies." + s.id, "statement '" + s.id + "' has no frequency series");
    if (static_cast<int>(it->second.size()) != time_steps)
      throw ValidationError("frequencies." + s.id, "statement '" + s.id + "' has " +
                                                       std::to_string(it->second.size()) + " entries, expected " +
                                                       std::to_string(time_steps));
    for (std::size_t t = 0; t < it->second.size(); ++t)
      if (!(it->second[t] >= 0) || !std::isfinite(it->second[t]))
        throw ValidationError("frequencies." + s.id + "[" + std::to_string(t) + "]", "must be finite and non-negative");
  }
  for (const auto& [id, series] : frequencies)
    if (!ids.count(id)) throw ValidationError("frequencies." + id, "no statement with id '" + id + "'");
}

const Statement* Workload::find(std::string_view id) const {
  for (const auto& s : statements)
    if (s.id == id) return &s;
  return nullptr;
}

Eigen::MatrixXd Workload::frequency_matrix() const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(statements.size()), time_steps);
  for (std::size_t i = 0; i < statements.size(); ++i) {
    const auto& series = frequencies.at(statements[i].id);
    for (int t = 0; t < time_steps; ++t) f(static_cast<Eigen::Index>(i), t) = series.at(static_cast<std::size_t>(t));
  }
  return f;
}

namespace {

struct Generator {
  int T;

  FrequencySeries operator()(const Periodical& p) const {
    if (p.base < 0) throw ValidationError("pattern.base", "must be non-negative");
    if (p.period < 1) throw ValidationError("pattern.period", "must be at least 1");
    FrequencySeries v(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) {
      const double x = p.base * (1.0 + p.amplitude * std::sin(2.0 * std::numbers::pi * (t - 1) / p.period + p.phase));
      v[static_cast<std::size_t>(t - 1)] = std::max(0.0, x);
    }
    return v;
  }

  FrequencySeries operator()(const Spike& s) const {
    if (s.base < 0) throw ValidationError("pattern.base", "must be non-negative");
    if (s.peak_step < 1 || s.peak_step > T) throw ValidationError("pattern.peak_step", "must lie in [1, T]");
    if (s.width < 1) throw ValidationError("pattern.width", "must be at least 1");
    FrequencySeries v(static_cast<std::size_t>(T), s.base);
    for (int t = 1; t <= T; ++t)
      if (std::abs(t - s.peak_step) < s.width) v[static_cast<std::size_t>(t - 1)] += s.base * s.magnitude;
    for (double& x : v) x = std::max(0.0, x);
    return v;
  }

  FrequencySeries operator()(const Linear& l) const {
    if (l.start < 0) throw ValidationError("pattern.start", "must be non-negative");
    FrequencySeries v(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t) v[static_cast<std::size_t>(t - 1)] = std::max(0.0, l.start + l.slope * (t - 1));
    return v;
  }
};

} // namespace

FrequencySeries gen_frequency(const FrequencyPattern& pattern, int time_steps) {
  if (time_steps < 1) throw ValidationError("time_steps", "must be positive");
  return std::visit(Generator{time_steps}, pattern);
}

Workload summarize_frequencies(const Workload& w, const SummaryMode& mode) {
  if (const auto* at = std::get_if<AtStep>(&mode))
    if (at->t < 1 || at->t > w.time_steps) throw ValidationError("t", "step outside [1, T]");
  Workload out = w;
  out.time_steps = 1;
  for (auto& [id, series] : out.frequencies) {
    double v = 0;
    if (const auto* at = std::get_if<AtStep>(&mode)) {
      v = series.at(static_cast<std::size_t>(at->t - 1));
    } else {
      for (double x : series) v += x;
      v /= static_cast<double>(series.size());
    }
    series = {v};
  }
  return out;
}

std::string to_string(StatementKind kind) { return kind == StatementKind::query ? "query" : "update"; }

std::string to_string(Multiplicity m) { return m == Multiplicity::one_to_many ? "one-to-many" : "one-to-one"; }

} // namespace tss

#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tss {

/// Qualified attribute reference, rendered as "entity.attribute".
struct AttrRef {
  std::string entity;
  std::string name;

  std::string str() const { return entity + "." + name; }
  auto operator<=>(const AttrRef&) const = default;
};

struct Attribute {
  std::string name;
  std::uint64_t cardinality = 1;
  std::uint32_t field_size = 1;

  bool operator==(const Attribute&) const = default;
};

struct Entity {
  std::string name;
  std::uint64_t record_count = 1;
  std::vector<Attribute> attributes;
  std::string primary_key;

  const Attribute* find(std::string_view attribute) const;
  bool operator==(const Entity&) const = default;
};

enum class Multiplicity { one_to_many, one_to_one };

/// Foreign-key edge. `from` is the one side, `to` the many side holding
/// `fk_attribute`; the join key is the primary key of `from`.
struct Relationship {
  std::string from;
  std::string to;
  std::string fk_attribute;
  Multiplicity multiplicity = Multiplicity::one_to_many;

  bool operator==(const Relationship&) const = default;
};

class EntityGraph {
public:
  EntityGraph() = default;
  /// Validates all invariants; throws ValidationError with a document path.
  EntityGraph(std::vector<Entity> entities, std::vector<Relationship> edges);

  const std::vector<Entity>& entities() const { return entities_; }
  const std::vector<Relationship>& edges() const { return edges_; }

  const Entity* find(std::string_view entity) const;
  const Entity& entity(std::string_view name) const;
  const Attribute* find(const AttrRef& ref) const;
  const Attribute& attribute(const AttrRef& ref) const;
  AttrRef key_of(std::string_view entity) const;

  /// Index of the edge joining a and b (either direction).
  std::optional<std::size_t> edge_between(std::string_view a, std::string_view b) const;
  /// Join attribute of an edge: the one-side primary key.
  AttrRef join_key(std::size_t edge) const;

  bool operator==(const EntityGraph&) const = default;

private:
  std::vector<Entity> entities_;
  std::vector<Relationship> edges_;
};

enum class StatementKind { query, update };

struct Statement {
  std::string id;
  StatementKind kind = StatementKind::query;
  std::string text;

  bool operator==(const Statement&) const = default;
};

using FrequencySeries = std::vector<double>;

struct Workload {
  std::vector<Statement> statements;
  std::map<std::string, FrequencySeries> frequencies;
  int time_steps = 1;
  double interval = 1.0;

  /// Checks series presence, lengths and non-negativity.
  void validate() const;
  const Statement* find(std::string_view id) const;
  /// Rows follow statement order, columns are time steps.
  Eigen::MatrixXd frequency_matrix() const;

  bool operator==(const Workload&) const = default;
};

struct Periodical {
  double base = 0;
  double amplitude = 0;
  double period = 1;
  double phase = 0;
};

struct Spike {
  double base = 0;
  int peak_step = 1;
  double magnitude = 0;
  int width = 1;
};

struct Linear {
  double start = 0;
  double slope = 0;
};

using FrequencyPattern = std::variant<Periodical, Spike, Linear>;

FrequencySeries gen_frequency(const FrequencyPattern& pattern, int time_steps);

struct Average {};
struct AtStep {
  int t = 1;
};
using SummaryMode = std::variant<Average, AtStep>;

/// Collapses the workload to a single step.
Workload summarize_frequencies(const Workload& w, const SummaryMode& mode);

std::string to_string(StatementKind kind);
std::string to_string(Multiplicity m);

} // namespace tss

#pragma once

#include "tsschema/domain.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace tss {

enum class CompareOp { eq, lt, gt };

struct Predicate {
  AttrRef attr;
  CompareOp op = CompareOp::eq;

  bool is_equality() const { return op == CompareOp::eq; }
  bool operator==(const Predicate&) const = default;
};

enum class AggregateFn { count, sum, avg, min, max };

struct Aggregate {
  AggregateFn fn = AggregateFn::count;
  AttrRef attr;

  bool operator==(const Aggregate&) const = default;
};

/// Parsed statement. Every literal is a `?` placeholder, so predicates carry
/// only the attribute and comparison.
struct QueryAst {
  StatementKind kind = StatementKind::query;
  std::vector<AttrRef> select;
  std::vector<Aggregate> aggregates;
  std::vector<std::string> from_path;
  std::vector<Predicate> where;
  std::vector<AttrRef> group_by;
  std::vector<AttrRef> order_by;
  std::vector<AttrRef> set_values;

  std::vector<AttrRef> equality_attrs() const;
  std::vector<AttrRef> range_attrs() const;
  bool has_equality() const;
  /// Every attribute the statement mentions, first-seen order.
  std::vector<AttrRef> referenced() const;

  bool operator==(const QueryAst&) const = default;
};

/// Syntax only; unqualified UPDATE attributes are qualified with the target.
QueryAst parse_syntax(std::string_view text, StatementKind kind);
/// Syntax plus semantic checks against the entity graph.
QueryAst parse(std::string_view text, StatementKind kind, const EntityGraph& g);
void validate(const QueryAst& ast, const EntityGraph& g);

/// Canonical text; parse(render(a)) == a.
std::string render(const QueryAst& ast);

struct QueryGraph {
  std::vector<std::string> nodes;
  /// Indices into EntityGraph::edges(), in path order.
  std::vector<std::size_t> edges;

  std::size_t edge_count() const { return edges.size(); }
};

QueryGraph build_query_graph(const QueryAst& ast, const EntityGraph& g);

std::string to_string(AggregateFn fn);

} // namespace tss

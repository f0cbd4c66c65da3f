#pragma once

#include "tsschema/domain.hpp"
#include "tsschema/query.hpp"

#include <map>
#include <string>
#include <vector>

namespace tss {

/// [partition][clustering prefix | tail] -> values.
struct ColumnFamily {
  std::string id;
  std::vector<AttrRef> partition_keys;
  std::vector<AttrRef> clustering_prefix;
  std::vector<AttrRef> clustering_tail;  // kept sorted
  std::vector<AttrRef> values;
  std::vector<std::string> path;  // source entities in join order
  double est_rows = 1;
  double row_bytes = 0;
  double est_size = 0;

  /// Stored attributes: partition, prefix, tail, then values.
  std::vector<AttrRef> attributes() const;
  std::vector<AttrRef> keys() const;
  bool stores(const AttrRef& a) const;
  bool is_key(const AttrRef& a) const;
  /// Compact "[p][c | t] -> [v]" rendering.
  std::string describe() const;
};

std::string content_hash(const std::string& text);

std::string column_family_id(const std::vector<AttrRef>& partition, const std::vector<AttrRef>& prefix,
                             const std::vector<AttrRef>& tail, const std::vector<AttrRef>& values);

/// True when the key attributes identify one row of the joined path.
bool keys_determine_row(const std::vector<AttrRef>& keys, const std::vector<std::string>& path, const EntityGraph& g);

ColumnFamily materialize_cf(const QueryAst& subquery, const EntityGraph& g);

struct RelaxedQuery {
  std::string origin;
  QueryAst ast;
  std::vector<AttrRef> moved;
};

/// Identity relaxation first, then every other subset of WHERE/ORDER BY items
/// in increasing bitmask order. Subsets dropping every equality are skipped.
std::vector<RelaxedQuery> enumerate_relaxed_queries(const QueryAst& ast, const std::string& origin = {});

/// One cut of a query-graph edge. `first` holds the driving equality
/// predicate; `second` is looked up by the join key.
struct EdgeCut {
  std::size_t position = 0;  // index into QueryGraph::edges
  std::vector<std::string> first_entities;
  std::vector<std::string> second_entities;
  AttrRef join_key;
  QueryAst first;
  QueryAst second;
};

struct Decomposition {
  QueryAst whole;
  std::vector<EdgeCut> cuts;

  std::size_t subquery_count() const { return 1 + 2 * cuts.size(); }
  std::vector<QueryAst> subqueries() const;
};

Decomposition decompose_query_graph(const QueryAst& q, const QueryGraph& qg, const EntityGraph& g);

struct ParsedStatement {
  Statement statement;
  QueryAst ast;
  QueryGraph graph;
};

std::vector<ParsedStatement> parse_workload(const Workload& w, const EntityGraph& g);

struct CandidateSet {
  std::vector<ColumnFamily> cfs;  // discovery order
  std::map<std::string, std::vector<std::string>> provenance;  // query id -> CF ids
  std::map<std::string, std::size_t> index;

  /// Appends unless the id is already present; returns the position.
  std::size_t add(ColumnFamily cf);

  const ColumnFamily* find(const std::string& id) const;
  std::optional<std::size_t> index_of(const std::string& id) const;
  bool contains(const std::string& id) const { return index_of(id).has_value(); }
  /// Keeps only the listed ids; provenance entries are filtered alike.
  CandidateSet restricted(const std::vector<std::string>& keep) const;
};

CandidateSet enumerate_candidates(const std::vector<ParsedStatement>& statements, const EntityGraph& g);

} // namespace tss

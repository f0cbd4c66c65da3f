#include "tsschema/column_family.hpp"

#include "tsschema/cost_model.hpp"
#include "tsschema/error.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace tss {

namespace {

void push_unique(std::vector<AttrRef>& v, const AttrRef& a) {
  if (std::find(v.begin(), v.end(), a) == v.end()) v.push_back(a);
}

bool contains(const std::vector<AttrRef>& v, const AttrRef& a) { return std::find(v.begin(), v.end(), a) != v.end(); }

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string joined(std::vector<AttrRef> v, bool sort) {
  if (sort) std::sort(v.begin(), v.end());
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].str();
  return out;
}

std::string list(const std::vector<AttrRef>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
  return out;
}

} // namespace

std::vector<AttrRef> ColumnFamily::keys() const {
  std::vector<AttrRef> out = partition_keys;
  out.insert(out.end(), clustering_prefix.begin(), clustering_prefix.end());
  out.insert(out.end(), clustering_tail.begin(), clustering_tail.end());
  return out;
}

std::vector<AttrRef> ColumnFamily::attributes() const {
  std::vector<AttrRef> out = keys();
  out.insert(out.end(), values.begin(), values.end());
  return out;
}

bool ColumnFamily::stores(const AttrRef& a) const { return is_key(a) || contains(values, a); }

bool ColumnFamily::is_key(const AttrRef& a) const {
  return contains(partition_keys, a) || contains(clustering_prefix, a) || contains(clustering_tail, a);
}

std::string ColumnFamily::describe() const {
  std::string c = list(clustering_prefix);
  if (!clustering_tail.empty()) c += (c.empty() ? "" : " | ") + list(clustering_tail);
  return "[" + list(partition_keys) + "][" + c + "] -> [" + list(values) + "]";
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string column_family_id(const std::vector<AttrRef>& partition, const std::vector<AttrRef>& prefix,
                             const std::vector<AttrRef>& tail, const std::vector<AttrRef>& values) {
  const std::string canonical =
      "P:" + joined(partition, true) + "|C:" + joined(prefix, false) + "|T:" + joined(tail, true) + "|V:" + joined(values, true);
  return "cf" + content_hash(canonical).substr(0, 10);
}

bool keys_determine_row(const std::vector<AttrRef>& keys, const std::vector<std::string>& path, const EntityGraph& g) {
  std::set<std::string> determined;
  for (const auto& k : keys)
    if (g.find(k.entity) && g.entity(k.entity).primary_key == k.name) determined.insert(k.entity);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const auto edge = g.edge_between(path[i - 1], path[i]);
      if (!edge) continue;
      const auto& r = g.edges()[*edge];
      auto propagate = [&](const std::string& from, const std::string& to) {
        if (determined.count(from) && !determined.count(to)) {
          determined.insert(to);
          changed = true;
        }
      };
      propagate(r.to, r.from);
      if (r.multiplicity == Multiplicity::one_to_one) propagate(r.from, r.to);
    }
  }
  return std::all_of(path.begin(), path.end(), [&](const std::string& e) { return determined.count(e) > 0; });
}

ColumnFamily materialize_cf(const QueryAst& subquery, const EntityGraph& g) {
  ColumnFamily cf;
  cf.path = subquery.from_path;
  cf.partition_keys = subquery.equality_attrs();
  if (cf.partition_keys.empty()) throw Error("no partition key derivable for '" + render(subquery) + "'");
  for (const auto& a : subquery.group_by)
    if (!contains(cf.partition_keys, a)) push_unique(cf.clustering_prefix, a);
  for (const auto& a : subquery.order_by)
    if (!contains(cf.partition_keys, a)) push_unique(cf.clustering_prefix, a);
  for (const auto& a : subquery.range_attrs())
    if (!contains(cf.partition_keys, a)) push_unique(cf.clustering_prefix, a);

  std::vector<AttrRef> keys = cf.partition_keys;
  keys.insert(keys.end(), cf.clustering_prefix.begin(), cf.clustering_prefix.end());
  if (!keys_determine_row(keys, cf.path, g)) {
    for (const auto& e : cf.path) {
      AttrRef pk = g.key_of(e);
      if (!contains(keys, pk)) cf.clustering_tail.push_back(pk);
    }
    std::sort(cf.clustering_tail.begin(), cf.clustering_tail.end());
  }
  auto add_value = [&](const AttrRef& a) {
    if (!cf.is_key(a)) push_unique(cf.values, a);
  };
  for (const auto& a : subquery.select) add_value(a);
  for (const auto& a : subquery.aggregates) add_value(a.attr);

  cf.id = column_family_id(cf.partition_keys, cf.clustering_prefix, cf.clustering_tail, cf.values);
  cf.est_rows = chain_rows(cf.path, g);
  cf.row_bytes = 0;
  for (const auto& a : cf.attributes()) cf.row_bytes += g.attribute(a).field_size;
  cf.est_size = cf.est_rows * cf.row_bytes;
  return cf;
}

std::vector<RelaxedQuery> enumerate_relaxed_queries(const QueryAst& ast, const std::string& origin) {
  const std::size_t nw = ast.where.size();
  const std::size_t items = nw + ast.order_by.size();
  if (items > 20) throw Error("too many movable attributes to relax");
  std::vector<RelaxedQuery> out;
  for (std::uint32_t mask = 0; mask < (1u << items); ++mask) {
    RelaxedQuery r;
    r.origin = origin;
    r.ast = ast;
    r.ast.where.clear();
    r.ast.order_by.clear();
    for (std::size_t i = 0; i < items; ++i) {
      const bool moved = mask & (1u << i);
      if (i < nw) {
        const auto& p = ast.where[i];
        if (moved)
          push_unique(r.moved, p.attr);
        else
          r.ast.where.push_back(p);
      } else {
        const auto& a = ast.order_by[i - nw];
        if (moved)
          push_unique(r.moved, a);
        else
          r.ast.order_by.push_back(a);
      }
    }
    if (ast.kind == StatementKind::query && !r.ast.has_equality()) continue;
    for (const auto& a : r.moved) push_unique(r.ast.select, a);
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

QueryAst side_query(const QueryAst& q, const std::vector<std::string>& side, const AttrRef& join_key, bool keyed) {
  auto in_side = [&](const AttrRef& a) { return contains(side, a.entity); };
  QueryAst s;
  s.kind = StatementKind::query;
  s.from_path = side;
  if (keyed) s.where.push_back({join_key, CompareOp::eq});
  for (const auto& p : q.where)
    if (in_side(p.attr)) s.where.push_back(p);
  for (const auto& a : q.select)
    if (in_side(a)) push_unique(s.select, a);
  for (const auto& a : q.aggregates)
    if (in_side(a.attr)) push_unique(s.select, a.attr);
  for (const auto& a : q.group_by)
    if (in_side(a)) push_unique(s.select, a);
  const bool order_here =
      keyed && !q.order_by.empty() && std::all_of(q.order_by.begin(), q.order_by.end(), in_side);
  if (order_here)
    s.order_by = q.order_by;
  else
    for (const auto& a : q.order_by)
      if (in_side(a)) push_unique(s.select, a);
  if (!keyed) push_unique(s.select, join_key);
  return s;
}

} // namespace

std::vector<QueryAst> Decomposition::subqueries() const {
  std::vector<QueryAst> out{whole};
  for (const auto& c : cuts) {
    out.push_back(c.first);
    out.push_back(c.second);
  }
  return out;
}

Decomposition decompose_query_graph(const QueryAst& q, const QueryGraph& qg, const EntityGraph& g) {
  Decomposition d;
  d.whole = q;
  std::string driver;
  for (const auto& p : q.where)
    if (p.is_equality()) {
      driver = p.attr.entity;
      break;
    }
  if (driver.empty() && !qg.edges.empty()) throw Error("cannot decompose a query without an equality predicate");
  for (std::size_t e = 0; e < qg.edges.size(); ++e) {
    std::vector<std::string> left(qg.nodes.begin(), qg.nodes.begin() + static_cast<std::ptrdiff_t>(e + 1));
    std::vector<std::string> right(qg.nodes.begin() + static_cast<std::ptrdiff_t>(e + 1), qg.nodes.end());
    EdgeCut cut;
    cut.position = e;
    cut.join_key = g.join_key(qg.edges[e]);
    const bool left_first = contains(left, driver);
    cut.first_entities = left_first ? left : right;
    cut.second_entities = left_first ? right : left;
    cut.first = side_query(q, cut.first_entities, cut.join_key, false);
    cut.second = side_query(q, cut.second_entities, cut.join_key, true);
    d.cuts.push_back(std::move(cut));
  }
  return d;
}

std::vector<ParsedStatement> parse_workload(const Workload& w, const EntityGraph& g) {
  std::vector<ParsedStatement> out;
  for (const auto& s : w.statements) {
    ParsedStatement p;
    p.statement = s;
    try {
      p.ast = parse(s.text, s.kind, g);
    } catch (const Error& e) {
      throw ValidationError("statements." + s.id, e.what());
    }
    p.graph = build_query_graph(p.ast, g);
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t CandidateSet::add(ColumnFamily cf) {
  auto it = index.find(cf.id);
  if (it != index.end()) return it->second;
  const std::size_t pos = cfs.size();
  index.emplace(cf.id, pos);
  cfs.push_back(std::move(cf));
  return pos;
}

const ColumnFamily* CandidateSet::find(const std::string& id) const {
  auto it = index.find(id);
  return it == index.end() ? nullptr : &cfs[it->second];
}

std::optional<std::size_t> CandidateSet::index_of(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

CandidateSet CandidateSet::restricted(const std::vector<std::string>& keep) const {
  const std::set<std::string> k(keep.begin(), keep.end());
  CandidateSet out;
  for (const auto& cf : cfs)
    if (k.count(cf.id)) out.add(cf);
  for (const auto& [q, ids] : provenance) {
    auto& dst = out.provenance[q];
    for (const auto& id : ids)
      if (k.count(id)) dst.push_back(id);
  }
  return out;
}

CandidateSet enumerate_candidates(const std::vector<ParsedStatement>& statements, const EntityGraph& g) {
  CandidateSet out;
  for (const auto& s : statements) {
    if (s.statement.kind != StatementKind::query) continue;
    auto& prov = out.provenance[s.statement.id];
    for (const auto& r : enumerate_relaxed_queries(s.ast, s.statement.id)) {
      const Decomposition d = decompose_query_graph(r.ast, s.graph, g);
      for (const auto& sub : d.subqueries()) {
        const std::size_t pos = out.add(materialize_cf(sub, g));
        if (!contains(prov, out.cfs[pos].id)) prov.push_back(out.cfs[pos].id);
      }
    }
  }
  return out;
}

} // namespace tss

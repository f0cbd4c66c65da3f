#include "tsschema/query.hpp"

#include "tsschema/error.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace tss {

namespace {

enum class Tok { ident, dot, comma, lparen, rparen, question, eq, lt, gt, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::ident, std::string(s.substr(i, j - i)), i});
      i = j;
      continue;
    }
    Tok k;
    switch (c) {
    case '.': k = Tok::dot; break;
    case ',': k = Tok::comma; break;
    case '(': k = Tok::lparen; break;
    case ')': k = Tok::rparen; break;
    case '?': k = Tok::question; break;
    case '=': k = Tok::eq; break;
    case '<': k = Tok::lt; break;
    case '>': k = Tok::gt; break;
    default: throw ParseError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({k, std::string(1, c), i});
    ++i;
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

const char* const kKeywords[] = {"SELECT", "FROM", "WHERE", "AND", "ORDER", "GROUP", "BY", "UPDATE", "SET"};

bool is_keyword(const std::string& s) {
  const std::string u = upper(s);
  return std::any_of(std::begin(kKeywords), std::end(kKeywords), [&](const char* k) { return u == k; });
}

class Parser {
public:
  Parser(std::string_view text, StatementKind kind) : toks_(tokenize(text)), kind_(kind) {}

  QueryAst run() {
    QueryAst ast;
    ast.kind = kind_;
    if (kind_ == StatementKind::query)
      parse_select(ast);
    else
      parse_update(ast);
    if (peek().kind != Tok::end) fail("unexpected trailing input '" + peek().text + "'");
    return ast;
  }

private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;
  StatementKind kind_;
  std::string update_target_;

  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

  bool at_keyword(const char* kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::ident && upper(peek(ahead).text) == kw;
  }
  void keyword(const char* kw) {
    if (!at_keyword(kw)) fail(std::string("expected ") + kw);
    ++at_;
  }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    ++at_;
  }
  std::string identifier() {
    if (peek().kind != Tok::ident || is_keyword(peek().text)) fail("expected identifier");
    return toks_[at_++].text;
  }

  AttrRef attribute() {
    std::string first = identifier();
    if (peek().kind == Tok::dot) {
      ++at_;
      return {std::move(first), identifier()};
    }
    if (kind_ == StatementKind::update) return {update_target_, std::move(first)};
    fail("attribute must be qualified as entity.attribute");
  }

  static std::optional<AggregateFn> aggregate_fn(const std::string& s) {
    const std::string u = upper(s);
    if (u == "COUNT") return AggregateFn::count;
    if (u == "SUM") return AggregateFn::sum;
    if (u == "AVG") return AggregateFn::avg;
    if (u == "MIN") return AggregateFn::min;
    if (u == "MAX") return AggregateFn::max;
    return std::nullopt;
  }

  void parse_select(QueryAst& ast) {
    keyword("SELECT");
    do {
      if (peek().kind == Tok::ident && peek(1).kind == Tok::lparen) {
        auto fn = aggregate_fn(peek().text);
        if (!fn) fail("unknown aggregate '" + peek().text + "'");
        at_ += 2;
        ast.aggregates.push_back({*fn, attribute()});
        expect(Tok::rparen, "')'");
      } else {
        ast.select.push_back(attribute());
      }
    } while (peek().kind == Tok::comma && (++at_, true));
    keyword("FROM");
    ast.from_path.push_back(identifier());
    while (peek().kind == Tok::dot) {
      ++at_;
      ast.from_path.push_back(identifier());
    }
    if (at_keyword("WHERE")) {
      ++at_;
      parse_conditions(ast);
    }
    if (at_keyword("GROUP")) {
      ++at_;
      keyword("BY");
      ast.group_by = attribute_list();
    }
    if (at_keyword("ORDER")) {
      ++at_;
      keyword("BY");
      ast.order_by = attribute_list();
    }
  }

  void parse_update(QueryAst& ast) {
    keyword("UPDATE");
    update_target_ = identifier();
    ast.from_path = {update_target_};
    keyword("SET");
    do {
      ast.set_values.push_back(attribute());
      expect(Tok::eq, "'='");
      expect(Tok::question, "'?'");
    } while (peek().kind == Tok::comma && (++at_, true));
    if (at_keyword("WHERE")) {
      ++at_;
      parse_conditions(ast);
    }
  }

  void parse_conditions(QueryAst& ast) {
    do {
      Predicate p;
      p.attr = attribute();
      switch (peek().kind) {
      case Tok::eq: p.op = CompareOp::eq; break;
      case Tok::lt: p.op = CompareOp::lt; break;
      case Tok::gt: p.op = CompareOp::gt; break;
      default: fail("expected '=', '<' or '>'");
      }
      ++at_;
      expect(Tok::question, "'?' placeholder");
      ast.where.push_back(std::move(p));
    } while (at_keyword("AND") && (++at_, true));
  }

  std::vector<AttrRef> attribute_list() {
    std::vector<AttrRef> out{attribute()};
    while (peek().kind == Tok::comma) {
      ++at_;
      out.push_back(attribute());
    }
    return out;
  }
};

void push_unique(std::vector<AttrRef>& v, const AttrRef& a) {
  if (std::find(v.begin(), v.end(), a) == v.end()) v.push_back(a);
}

std::string join_attrs(const std::vector<AttrRef>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
  return out;
}

} // namespace

std::vector<AttrRef> QueryAst::equality_attrs() const {
  std::vector<AttrRef> out;
  for (const auto& p : where)
    if (p.is_equality()) push_unique(out, p.attr);
  return out;
}

std::vector<AttrRef> QueryAst::range_attrs() const {
  std::vector<AttrRef> out;
  for (const auto& p : where)
    if (!p.is_equality()) push_unique(out, p.attr);
  return out;
}

bool QueryAst::has_equality() const {
  return std::any_of(where.begin(), where.end(), [](const Predicate& p) { return p.is_equality(); });
}

std::vector<AttrRef> QueryAst::referenced() const {
  std::vector<AttrRef> out;
  for (const auto& a : select) push_unique(out, a);
  for (const auto& a : aggregates) push_unique(out, a.attr);
  for (const auto& p : where) push_unique(out, p.attr);
  for (const auto& a : group_by) push_unique(out, a);
  for (const auto& a : order_by) push_unique(out, a);
  for (const auto& a : set_values) push_unique(out, a);
  return out;
}

QueryAst parse_syntax(std::string_view text, StatementKind kind) { return Parser(text, kind).run(); }

void validate(const QueryAst& ast, const EntityGraph& g) {
  if (ast.from_path.empty()) throw ValidationError("from", "empty FROM path");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ast.from_path.size(); ++i) {
    const auto& e = ast.from_path[i];
    if (!g.find(e)) throw ValidationError("from", "unknown entity '" + e + "'");
    if (!seen.insert(e).second) throw ValidationError("from", "cyclic path revisits '" + e + "'");
    if (i > 0 && !g.edge_between(ast.from_path[i - 1], e))
      throw ValidationError("from", "'" + ast.from_path[i - 1] + "' and '" + e + "' are not adjacent");
  }
  for (const auto& a : ast.referenced()) {
    if (!g.find(a.entity)) throw ValidationError(a.str(), "unknown entity '" + a.entity + "'");
    if (!g.find(a)) throw ValidationError(a.str(), "unknown attribute '" + a.str() + "'");
    if (!seen.count(a.entity)) throw ValidationError(a.str(), "entity '" + a.entity + "' is not in the FROM path");
  }
  if (ast.kind == StatementKind::query) {
    if (!ast.set_values.empty()) throw ValidationError("set", "SET is only valid in updates");
    if (ast.select.empty() && ast.aggregates.empty()) throw ValidationError("select", "empty SELECT list");
    if (!ast.has_equality()) throw ValidationError("where", "a query needs at least one equality predicate");
  } else {
    if (ast.from_path.size() != 1) throw ValidationError("from", "an update targets a single entity");
    if (ast.set_values.empty()) throw ValidationError("set", "empty SET list");
    if (!ast.aggregates.empty() || !ast.order_by.empty() || !ast.group_by.empty() || !ast.select.empty())
      throw ValidationError("update", "updates take only SET and WHERE clauses");
  }
}

QueryAst parse(std::string_view text, StatementKind kind, const EntityGraph& g) {
  QueryAst ast = parse_syntax(text, kind);
  validate(ast, g);
  return ast;
}

std::string render(const QueryAst& ast) {
  std::string out;
  auto conditions = [&] {
    if (ast.where.empty()) return;
    out += " WHERE ";
    for (std::size_t i = 0; i < ast.where.size(); ++i) {
      const auto& p = ast.where[i];
      out += (i ? " AND " : "") + p.attr.str() + (p.op == CompareOp::eq ? " = ?" : p.op == CompareOp::lt ? " < ?" : " > ?");
    }
  };
  if (ast.kind == StatementKind::update) {
    out = "UPDATE " + ast.from_path.front() + " SET ";
    for (std::size_t i = 0; i < ast.set_values.size(); ++i) out += (i ? ", " : "") + ast.set_values[i].str() + " = ?";
    conditions();
    return out;
  }
  out = "SELECT " + join_attrs(ast.select);
  for (std::size_t i = 0; i < ast.aggregates.size(); ++i)
    out += ((i || !ast.select.empty()) ? ", " : "") + to_string(ast.aggregates[i].fn) + "(" + ast.aggregates[i].attr.str() + ")";
  out += " FROM ";
  for (std::size_t i = 0; i < ast.from_path.size(); ++i) out += (i ? "." : "") + ast.from_path[i];
  conditions();
  if (!ast.group_by.empty()) out += " GROUP BY " + join_attrs(ast.group_by);
  if (!ast.order_by.empty()) out += " ORDER BY " + join_attrs(ast.order_by);
  return out;
}

QueryGraph build_query_graph(const QueryAst& ast, const EntityGraph& g) {
  QueryGraph qg;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < ast.from_path.size(); ++i) {
    const auto& e = ast.from_path[i];
    if (!seen.insert(e).second) throw ValidationError("from", "cyclic path revisits '" + e + "'");
    qg.nodes.push_back(e);
    if (i > 0) {
      auto edge = g.edge_between(ast.from_path[i - 1], e);
      if (!edge) throw ValidationError("from", "'" + ast.from_path[i - 1] + "' and '" + e + "' are not adjacent");
      qg.edges.push_back(*edge);
    }
  }
  return qg;
}

std::string to_string(AggregateFn fn) {
  switch (fn) {
  case AggregateFn::count: return "COUNT";
  case AggregateFn::sum: return "SUM";
  case AggregateFn::avg: return "AVG";
  case AggregateFn::min: return "MIN";
  case AggregateFn::max: return "MAX";
  }
  return "COUNT";
}

} // namespace tss

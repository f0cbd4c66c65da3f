#include "tsschema/domain_io.hpp"

#include "tsschema/error.hpp"
#include "tsschema/query.hpp"

#include <fstream>
#include <sstream>

namespace tss {

namespace {

const json& member(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(path + "." + key, "missing field");
  return *it;
}

template <class T>
T get(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError(path + "." + key, "wrong type");
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, key, path);
}

std::uint64_t positive_integer(const json& obj, const char* key, const std::string& path) {
  const json& v = member(obj, key, path);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ValidationError(path + "." + key, "expected a positive integer");
  return v.get<std::uint64_t>();
}

Multiplicity multiplicity_from(const std::string& s, const std::string& path) {
  if (s == "one-to-many" || s == "one_to_many" || s == "1:n") return Multiplicity::one_to_many;
  if (s == "one-to-one" || s == "one_to_one" || s == "1:1") return Multiplicity::one_to_one;
  throw ValidationError(path, "unknown multiplicity '" + s + "'");
}

StatementKind kind_from(const std::string& s, const std::string& path) {
  if (s == "query") return StatementKind::query;
  if (s == "update") return StatementKind::update;
  throw ValidationError(path, "kind must be 'query' or 'update'");
}

FrequencySeries series_from(const json& v, const std::string& path, int T) {
  if (v.is_object() && v.contains("pattern")) return gen_frequency(pattern_from_json(v.at("pattern")), T);
  if (!v.is_array()) throw ValidationError(path, "expected an array or a {pattern} object");
  FrequencySeries s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ValidationError(path + "[" + std::to_string(i) + "]", "expected a number");
    s.push_back(v[i].get<double>());
  }
  return s;
}

} // namespace

EntityGraph schema_from_json(const json& doc) {
  std::vector<Entity> entities;
  const json& es = member(doc, "entities", "");
  if (!es.is_array()) throw ValidationError("entities", "expected an array");
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string path = "entities[" + std::to_string(i) + "]";
    Entity e;
    e.name = get<std::string>(es[i], "name", path);
    e.record_count = positive_integer(es[i], "record_count", path);
    e.primary_key = get<std::string>(es[i], "primary_key", path);
    const json& as = member(es[i], "attributes", path);
    if (!as.is_array()) throw ValidationError(path + ".attributes", "expected an array");
    for (std::size_t k = 0; k < as.size(); ++k) {
      const std::string apath = path + ".attributes[" + std::to_string(k) + "]";
      Attribute a;
      a.name = get<std::string>(as[k], "name", apath);
      a.cardinality = positive_integer(as[k], "cardinality", apath);
      a.field_size = static_cast<std::uint32_t>(positive_integer(as[k], "field_size", apath));
      e.attributes.push_back(std::move(a));
    }
    entities.push_back(std::move(e));
  }
  std::vector<Relationship> edges;
  if (doc.contains("edges")) {
    const json& rs = doc.at("edges");
    if (!rs.is_array()) throw ValidationError("edges", "expected an array");
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const std::string path = "edges[" + std::to_string(i) + "]";
      Relationship r;
      r.from = get<std::string>(rs[i], "from", path);
      r.to = get<std::string>(rs[i], "to", path);
      r.fk_attribute = get<std::string>(rs[i], "fk_attribute", path);
      r.multiplicity = multiplicity_from(get_or<std::string>(rs[i], "multiplicity", "one-to-many", path), path + ".multiplicity");
      edges.push_back(std::move(r));
    }
  }
  return EntityGraph(std::move(entities), std::move(edges));
}

json to_json(const EntityGraph& g) {
  json entities = json::array();
  for (const auto& e : g.entities()) {
    json attrs = json::array();
    for (const auto& a : e.attributes)
      attrs.push_back({{"name", a.name}, {"cardinality", a.cardinality}, {"field_size", a.field_size}});
    entities.push_back(
        {{"name", e.name}, {"record_count", e.record_count}, {"primary_key", e.primary_key}, {"attributes", attrs}});
  }
  json edges = json::array();
  for (const auto& r : g.edges())
    edges.push_back(
        {{"from", r.from}, {"to", r.to}, {"fk_attribute", r.fk_attribute}, {"multiplicity", to_string(r.multiplicity)}});
  return {{"entities", entities}, {"edges", edges}};
}

FrequencyPattern pattern_from_json(const json& doc) {
  const std::string type = get<std::string>(doc, "type", "pattern");
  if (type == "periodical")
    return Periodical{get<double>(doc, "base", "pattern"), get<double>(doc, "amplitude", "pattern"),
                      get<double>(doc, "period", "pattern"), get_or<double>(doc, "phase", 0.0, "pattern")};
  if (type == "spike")
    return Spike{get<double>(doc, "base", "pattern"), get<int>(doc, "peak_step", "pattern"),
                 get<double>(doc, "magnitude", "pattern"), get_or<int>(doc, "width", 1, "pattern")};
  if (type == "linear") return Linear{get<double>(doc, "start", "pattern"), get_or<double>(doc, "slope", 0.0, "pattern")};
  throw ValidationError("pattern.type", "unknown pattern '" + type + "'");
}

json to_json(const FrequencyPattern& p) {
  if (const auto* x = std::get_if<Periodical>(&p))
    return {{"type", "periodical"}, {"base", x->base}, {"amplitude", x->amplitude}, {"period", x->period}, {"phase", x->phase}};
  if (const auto* x = std::get_if<Spike>(&p))
    return {{"type", "spike"}, {"base", x->base}, {"peak_step", x->peak_step}, {"magnitude", x->magnitude}, {"width", x->width}};
  const auto& l = std::get<Linear>(p);
  return {{"type", "linear"}, {"start", l.start}, {"slope", l.slope}};
}

Workload workload_from_json(const json& doc) {
  Workload w;
  const json& T = member(doc, "time_steps", "");
  if (!T.is_number_integer() || T.get<long long>() < 1) throw ValidationError("time_steps", "expected a positive integer");
  w.time_steps = T.get<int>();
  w.interval = get_or<double>(doc, "interval_seconds", 1.0, "");
  const json& ss = member(doc, "statements", "");
  if (!ss.is_array()) throw ValidationError("statements", "expected an array");
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const std::string path = "statements[" + std::to_string(i) + "]";
    Statement s;
    s.id = get<std::string>(ss[i], "id", path);
    s.kind = kind_from(get<std::string>(ss[i], "kind", path), path + ".kind");
    s.text = get<std::string>(ss[i], "text", path);
    w.statements.push_back(std::move(s));
  }
  if (doc.contains("frequencies")) {
    const json& fs = doc.at("frequencies");
    if (!fs.is_object()) throw ValidationError("frequencies", "expected an object");
    for (const auto& [id, v] : fs.items()) w.frequencies[id] = series_from(v, "frequencies." + id, w.time_steps);
  }
  if (doc.contains("generators")) {
    const json& gs = doc.at("generators");
    if (!gs.is_array()) throw ValidationError("generators", "expected an array");
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const std::string path = "generators[" + std::to_string(i) + "]";
      const std::string id = get<std::string>(gs[i], "id", path);
      w.frequencies[id] = gen_frequency(pattern_from_json(member(gs[i], "pattern", path)), w.time_steps);
    }
  }
  w.validate();
  return w;
}

json to_json(const Workload& w) {
  json statements = json::array();
  for (const auto& s : w.statements) statements.push_back({{"id", s.id}, {"kind", to_string(s.kind)}, {"text", s.text}});
  json freqs = json::object();
  for (const auto& [id, series] : w.frequencies) freqs[id] = series;
  return {{"time_steps", w.time_steps}, {"interval_seconds", w.interval}, {"statements", statements}, {"frequencies", freqs}};
}

json parse_json_document(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(what, std::string("malformed JSON: ") + e.what());
  }
}

std::pair<EntityGraph, Workload> load_domain(std::string_view schema_document, std::string_view workload_document) {
  EntityGraph g = schema_from_json(parse_json_document(schema_document, "schema"));
  Workload w = workload_from_json(parse_json_document(workload_document, "workload"));
  for (std::size_t i = 0; i < w.statements.size(); ++i) {
    const auto& s = w.statements[i];
    try {
      parse(s.text, s.kind, g);
    } catch (const Error& e) {
      throw ValidationError("statements[" + std::to_string(i) + "].text", "statement '" + s.id + "': " + e.what());
    }
  }
  return {std::move(g), std::move(w)};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace tss

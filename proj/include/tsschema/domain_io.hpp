#pragma once

#include "tsschema/domain.hpp"

#include <json.hpp>

#include <string_view>
#include <utility>

namespace tss {

using json = nlohmann::json;

EntityGraph schema_from_json(const json& doc);
json to_json(const EntityGraph& g);

FrequencyPattern pattern_from_json(const json& doc);
json to_json(const FrequencyPattern& p);

/// Accepts literal series and `{"pattern": {...}}` generator entries, plus an
/// optional top-level "generators" list of {id, pattern}.
Workload workload_from_json(const json& doc);
json to_json(const Workload& w);

/// Parses and validates both documents, including every statement text.
std::pair<EntityGraph, Workload> load_domain(std::string_view schema_document, std::string_view workload_document);

json parse_json_document(std::string_view text, const std::string& what);
std::string read_file(const std::string& path);

} // namespace tss

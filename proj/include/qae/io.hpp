#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qae/model.hpp"

// JSON and JSON Lines forms of the domain types.
namespace qae::io {

using nlohmann::json;

json pairs_to_json(const std::vector<AVPair>& pairs);
std::vector<AVPair> pairs_from_json(const json& j);

AttributeSpace load_attribute_space(const json& doc);
AttributeSpace load_attribute_space_file(const std::string& path);
json to_json(const AttributeSpace& space);

json to_json(const AccessRequest& req);
AccessRequest request_from_json(const json& j);

json to_json(const HistoryRecord& rec);
HistoryRecord history_from_json(const json& j);

json to_json(const PolicyRule& rule);
PolicyRule policy_from_json(const json& j);

json subject_to_json(const SubjectRecord& s);
json object_to_json(const ObjectRecord& o);

/// Applies one population line to the registry.
void apply_population_line(Registry& registry, const json& line);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::vector<json> read_jsonl_file(const std::string& path);

}  // namespace qae::io

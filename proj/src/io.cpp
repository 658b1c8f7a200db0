#include "qae/io.hpp"

#include <fstream>
#include <sstream>

#include "qae/error.hpp"

namespace qae::io {

json pairs_to_json(const std::vector<AVPair>& pairs) {
  json j = json::object();
  for (const auto& p : pairs) j[p.attr] = p.value;
  return j;
}

std::vector<AVPair> pairs_from_json(const json& j) {
  std::vector<AVPair> out;
  for (const auto& [k, v] : j.items()) out.push_back({k, v.get<std::string>()});
  return out;
}

AttributeSpace load_attribute_space(const json& doc) {
  AttributeSpace space;
  try {
    for (const auto& a : doc.at("attributes")) {
      AttributeDef def;
      def.name = a.at("name").get<std::string>();
      def.cls = parse_attr_class(a.at("class").get<std::string>());
      def.initial_weight = a.value("initial_weight", 0.0);
      def.domain = a.at("domain").get<std::vector<std::string>>();
      space.add(std::move(def));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("attribute space: ") + e.what());
  }
  return space;
}

AttributeSpace load_attribute_space_file(const std::string& path) {
  return load_attribute_space(read_json_file(path));
}

json to_json(const AttributeSpace& space) {
  json attrs = json::array();
  for (const auto& d : space.defs()) {
    attrs.push_back({{"name", d.name},
                     {"class", to_string(d.cls)},
                     {"initial_weight", d.initial_weight},
                     {"domain", d.domain}});
  }
  return {{"attributes", attrs}};
}

json to_json(const AccessRequest& req) {
  const auto& sc = req.signed_credential;
  return {{"seq", req.seq},
          {"credential", pairs_to_json(sc.credential.pairs())},
          {"signature", crypto::base64_encode(sc.signature)},
          {"signer_pk", crypto::base64_encode(sc.signer_pk)},
          {"object_id", req.object_id},
          {"op", req.op},
          {"env", pairs_to_json(req.env)}};
}

AccessRequest request_from_json(const json& j) {
  try {
    AccessRequest req;
    req.seq = j.at("seq").get<std::uint64_t>();
    req.signed_credential.credential = Credential(pairs_from_json(j.at("credential")));
    req.signed_credential.signature =
        crypto::base64_decode_fixed<64>(j.at("signature").get<std::string>());
    req.signed_credential.signer_pk =
        crypto::base64_decode_fixed<32>(j.at("signer_pk").get<std::string>());
    req.object_id = j.at("object_id").get<std::string>();
    req.op = j.at("op").get<std::string>();
    if (j.contains("env")) req.env = normalize_pairs(pairs_from_json(j.at("env")));
    return req;
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("request: ") + e.what());
  }
}

json to_json(const HistoryRecord& rec) {
  json j = to_json(rec.request);
  j["true_subject"] = rec.true_subject;
  j["outcome"] = to_string(rec.outcome);
  j["reason"] = to_string(rec.reason);
  j["entropy"] = rec.entropy;
  return j;
}

HistoryRecord history_from_json(const json& j) {
  try {
    HistoryRecord rec;
    rec.request = request_from_json(j);
    rec.true_subject = j.at("true_subject").get<std::string>();
    rec.outcome = parse_outcome(j.at("outcome").get<std::string>());
    rec.reason = parse_reason(j.at("reason").get<std::string>());
    rec.entropy = j.at("entropy").get<double>();
    return rec;
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("history: ") + e.what());
  }
}

json to_json(const PolicyRule& rule) {
  return {{"id", rule.id}, {"attrs", pairs_to_json(rule.constraints)}};
}

PolicyRule policy_from_json(const json& j) {
  try {
    PolicyRule r{j.at("id").get<std::string>(), normalize_pairs(pairs_from_json(j.at("attrs")))};
    if (r.constraints.empty()) throw Error(Errc::invalid_argument, "empty rule " + r.id);
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("policy: ") + e.what());
  }
}

json subject_to_json(const SubjectRecord& s) {
  return {{"kind", "subject"},
          {"id", s.id},
          {"pairs", pairs_to_json(s.pairs)},
          {"pk", crypto::base64_encode(s.pk)}};
}

json object_to_json(const ObjectRecord& o) {
  return {{"kind", "object"}, {"id", o.id}, {"pairs", pairs_to_json(o.pairs)}};
}

void apply_population_line(Registry& registry, const json& line) {
  try {
    const auto kind = line.at("kind").get<std::string>();
    auto id = line.at("id").get<std::string>();
    auto pairs = pairs_from_json(line.at("pairs"));
    if (kind == "subject") {
      crypto::PublicKey pk{};
      if (line.contains("pk")) pk = crypto::base64_decode_fixed<32>(line.at("pk").get<std::string>());
      registry.register_subject(std::move(pairs), pk, std::move(id));
    } else if (kind == "object") {
      registry.register_object(std::move(id), std::move(pairs));
    } else {
      throw Error(Errc::corrupt_file, "population kind " + kind);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("population: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::corrupt_file, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::io_error, "short write to " + path);
}

std::vector<json> read_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + path);
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(Errc::corrupt_file, path + ": " + e.what());
    }
  }
  return out;
}

}  // namespace qae::io

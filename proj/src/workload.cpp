#include "qae/workload.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "qae/error.hpp"
#include "qae/ewpt.hpp"
#include "qae/io.hpp"

namespace qae {
namespace {

using Rng = std::mt19937_64;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string padded(const char* prefix, std::uint64_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

int width_for(std::uint64_t n) { return static_cast<int>(std::to_string(n).size()); }

AttributeSpace make_space(const CaseSpec& spec, const GenOptions& opt) {
  AttributeSpace space;
  std::vector<std::string> values;
  for (std::uint32_t v = 1; v <= spec.value_range; ++v) values.push_back("v" + std::to_string(v));
  for (std::uint32_t i = 1; i <= spec.n_subject_attrs; ++i) {
    space.add({"sa" + std::to_string(i), AttrClass::subject, 1.0, values});
  }
  for (std::uint32_t i = 1; i <= spec.n_object_attrs; ++i) {
    space.add({"oa" + std::to_string(i), AttrClass::object, 1.0, values});
  }
  static const char* kOps[] = {"read", "write", "execute", "delete", "admin"};
  std::vector<std::string> ops;
  for (std::uint32_t i = 0; i < std::clamp<std::uint32_t>(opt.n_operations, 1, 5); ++i) {
    ops.emplace_back(kOps[i]);
  }
  space.add({"op", AttrClass::operation, 1.0, ops});
  return space;
}

std::vector<AVPair> random_pairs(Rng& rng, const AttributeSpace& space,
                                 const std::vector<std::uint32_t>& attrs) {
  std::vector<AVPair> pairs;
  for (auto a : attrs) {
    const auto& def = space.at(a);
    pairs.push_back({def.name, def.domain[uniform(rng, 0, def.domain.size() - 1)]});
  }
  return pairs;
}

// Every pair a request carries, sorted by (attr, value).
std::vector<AVPair> full_pairs(const AccessRequest& req, const Registry& registry) {
  std::vector<AVPair> pairs = req.signed_credential.credential.pairs();
  const auto* obj = registry.find_object(req.object_id);
  pairs.insert(pairs.end(), obj->pairs.begin(), obj->pairs.end());
  pairs.push_back({"op", req.op});
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

double match_fraction(const std::vector<AVPair>& sorted_rule,
                      const std::vector<std::vector<AVPair>>& sample) {
  std::size_t hits = 0;
  for (const auto& req : sample) {
    if (std::includes(req.begin(), req.end(), sorted_rule.begin(), sorted_rule.end())) ++hits;
  }
  return sample.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(sample.size());
}

}  // namespace

const std::vector<CaseSpec>& all_cases() {
  static const std::vector<CaseSpec> cases = {
      {"C1", 5000, 10000, 1000000, 100, 4, 4, 2},
      {"C2", 10000, 10000, 1000000, 100, 4, 4, 2},
      {"C3", 15000, 10000, 1000000, 100, 4, 4, 2},
      {"C4", 10000, 5000, 1000000, 100, 4, 4, 2},
      {"C5", 10000, 15000, 1000000, 100, 4, 4, 2},
      {"C6", 10000, 10000, 500000, 100, 4, 4, 2},
      {"C7", 10000, 10000, 1500000, 100, 4, 4, 2},
      {"C8", 10000, 10000, 1000000, 50, 4, 4, 2},
      {"C9", 10000, 10000, 1000000, 150, 4, 4, 2},
      {"C10", 10000, 10000, 1000000, 100, 2, 4, 2},
      {"C11", 10000, 10000, 1000000, 100, 6, 4, 2},
      {"C12", 15000, 10000, 1000000, 100, 4, 5, 2},
      {"C13", 15000, 10000, 1000000, 100, 4, 3, 2},
      {"C14", 10000, 10000, 1000000, 100, 2, 4, 4},
      {"C15", 10000, 10000, 1000000, 100, 2, 4, 3},
  };
  return cases;
}

CaseSpec case_spec(std::string_view name) {
  for (const auto& c : all_cases()) {
    if (c.name == name) return c;
  }
  throw Error(Errc::unknown_case, std::string(name));
}

std::string case_spec_json(const CaseSpec& s) {
  io::json j = {{"name", s.name},
                {"subjects", s.n_subjects},
                {"objects", s.n_objects},
                {"requests", s.n_requests},
                {"policies", s.n_policies},
                {"value_range", s.value_range},
                {"subject_attrs", s.n_subject_attrs},
                {"object_attrs", s.n_object_attrs}};
  return j.dump();
}

CaseSpec case_spec_from_json(std::string_view text) {
  try {
    const auto j = io::json::parse(text);
    return {j.at("name").get<std::string>(),         j.at("subjects").get<std::uint64_t>(),
            j.at("objects").get<std::uint64_t>(),    j.at("requests").get<std::uint64_t>(),
            j.at("policies").get<std::uint64_t>(),   j.at("value_range").get<std::uint32_t>(),
            j.at("subject_attrs").get<std::uint32_t>(), j.at("object_attrs").get<std::uint32_t>()};
  } catch (const io::json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("case spec: ") + e.what());
  }
}

std::uint64_t scaled_count(std::uint64_t count, double scale, std::uint64_t guard) {
  const auto scaled = static_cast<std::uint64_t>(std::llround(scale * static_cast<double>(count)));
  return std::max(guard, scaled);
}

Workload generate(const CaseSpec& spec, std::uint64_t seed, double scale,
                  const GenOptions& options) {
  if (!(scale > 0.0 && scale <= 1.0)) {
    throw Error(Errc::invalid_argument, "scale must be in (0, 1]");
  }
  if (spec.value_range == 0 || spec.n_subject_attrs == 0) {
    throw Error(Errc::invalid_argument, "case " + spec.name + " has an empty attribute space");
  }
  if (!(options.target_match_rate > 0.0 && options.target_match_rate < 1.0)) {
    throw Error(Errc::invalid_argument, "target match rate must be in (0, 1)");
  }
  const auto n_sub = scaled_count(spec.n_subjects, scale, 10);
  const auto n_obj = scaled_count(spec.n_objects, scale, 10);
  const auto n_pol = scaled_count(spec.n_policies, scale, 5);
  const auto n_req = scaled_count(spec.n_requests, scale, 100);

  Rng rng(seed ^ fnv1a(spec.name));
  Workload w;
  w.spec = spec;
  w.seed = seed;
  w.scale = scale;
  w.options = options;
  w.registry = Registry(make_space(spec, options));
  const auto& space = w.registry.space();
  const auto subject_attrs = space.of_class(AttrClass::subject);
  const auto object_attrs = space.of_class(AttrClass::object);
  const auto& op_domain = space.find("op")->domain;

  std::vector<crypto::KeyPair> keys;
  keys.reserve(n_sub);
  for (std::uint64_t i = 1; i <= n_sub; ++i) {
    crypto::Seed s{};
    for (auto& b : s) b = static_cast<std::uint8_t>(uniform(rng, 0, 255));
    keys.push_back(crypto::keygen(s));
    w.registry.register_subject(random_pairs(rng, space, subject_attrs), keys.back().pk,
                                padded("s", i, width_for(n_sub)));
    w.subject_seeds.push_back(crypto::base64_encode(keys.back().seed));
  }
  for (std::uint64_t i = 1; i <= n_obj; ++i) {
    w.registry.register_object(padded("o", i, width_for(n_obj)),
                               random_pairs(rng, space, object_attrs));
  }

  std::map<std::pair<std::uint64_t, std::string>, crypto::SignedCredential> signed_cache;
  w.requests.reserve(n_req);
  for (std::uint64_t i = 0; i < n_req; ++i) {
    const auto subject = uniform(rng, 0, n_sub - 1);
    auto pairs = w.registry.subjects()[subject].pairs;
    std::shuffle(pairs.begin(), pairs.end(), rng);
    const auto lo = std::min<std::uint64_t>(std::max<std::uint32_t>(options.min_credential, 1),
                                            pairs.size());
    pairs.resize(uniform(rng, lo, pairs.size()));
    Credential cred(std::move(pairs));
    auto [it, fresh] = signed_cache.try_emplace({subject, cred.key()});
    if (fresh) it->second = crypto::sign_credential(keys[subject], cred);

    AccessRequest req;
    req.signed_credential = it->second;
    req.object_id = w.registry.objects()[uniform(rng, 0, n_obj - 1)].id;
    req.op = op_domain[uniform(rng, 0, op_domain.size() - 1)];
    req.seq = i + 1;
    w.requests.push_back(std::move(req));
  }

  // Rule generality is tuned on a sample of the stream so that the union of
  // credential-seeded rules admits roughly the target fraction of requests.
  std::vector<std::vector<AVPair>> sample;
  const std::uint64_t stride = std::max<std::uint64_t>(1, n_req / 4000);
  for (std::uint64_t i = 0; i < n_req; i += stride) {
    sample.push_back(full_pairs(w.requests[i], w.registry));
  }
  const auto n_seeded = (n_pol + 1) / 2;
  const double per_rule =
      1.0 - std::pow(1.0 - options.target_match_rate, 1.0 / static_cast<double>(n_seeded));

  const int id_width = std::max(4, width_for(n_pol));
  for (std::uint64_t p = 0; p < n_pol; ++p) {
    PolicyRule rule;
    rule.id = padded("r", p + 1, id_width);
    if (p < n_seeded) {
      auto pairs = full_pairs(w.requests[uniform(rng, 0, n_req - 1)], w.registry);
      std::shuffle(pairs.begin(), pairs.end(), rng);
      std::vector<AVPair> best;
      double best_gap = 2.0;
      for (std::size_t len = 1; len <= pairs.size(); ++len) {
        std::vector<AVPair> candidate(pairs.begin(), pairs.begin() + static_cast<long>(len));
        std::sort(candidate.begin(), candidate.end());
        const double gap = std::abs(match_fraction(candidate, sample) - per_rule);
        if (gap <= best_gap) {
          best_gap = gap;
          best = std::move(candidate);
        }
      }
      rule.constraints = std::move(best);
    } else {
      std::vector<std::uint32_t> attrs(space.size());
      for (std::uint32_t a = 0; a < attrs.size(); ++a) attrs[a] = a;
      std::shuffle(attrs.begin(), attrs.end(), rng);
      attrs.resize(uniform(rng, 1, attrs.size()));
      rule.constraints = normalize_pairs(random_pairs(rng, space, attrs));
    }
    w.policies.push_back(std::move(rule));
  }
  return w;
}

double subset_match_rate(const Workload& w) {
  if (w.requests.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& req : w.requests) {
    if (linear_scan(w.policies, full_pairs(req, w.registry), ScanSemantics::subset)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(w.requests.size());
}

void write_workload(const Workload& w, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir + ": " + ec.message());
  const std::filesystem::path root(dir);

  io::write_text_file((root / "space.json").string(), io::to_json(w.registry.space()).dump(2) + "\n");

  std::ostringstream pop;
  for (const auto& s : w.registry.subjects()) pop << io::subject_to_json(s).dump() << '\n';
  for (const auto& o : w.registry.objects()) pop << io::object_to_json(o).dump() << '\n';
  io::write_text_file((root / "population.jsonl").string(), pop.str());

  io::json policies = io::json::array();
  for (const auto& r : w.policies) policies.push_back(io::to_json(r));
  io::write_text_file((root / "policies.json").string(), policies.dump(2) + "\n");

  std::ostringstream reqs;
  for (const auto& r : w.requests) reqs << io::to_json(r).dump() << '\n';
  io::write_text_file((root / "requests.jsonl").string(), reqs.str());

  std::ostringstream keys;
  for (std::size_t i = 0; i < w.subject_seeds.size(); ++i) {
    const auto& s = w.registry.subjects()[i];
    keys << io::json{{"id", s.id}, {"pk", crypto::base64_encode(s.pk)}, {"seed", w.subject_seeds[i]}}
                .dump()
         << '\n';
  }
  io::write_text_file((root / "keys.jsonl").string(), keys.str());

  io::json manifest = {
      {"case", w.spec.name},
      {"spec", io::json::parse(case_spec_json(w.spec))},
      {"seed", w.seed},
      {"scale", w.scale},
      {"target_match_rate", w.options.target_match_rate},
      {"n_operations", w.options.n_operations},
      {"min_credential", w.options.min_credential},
      {"counts",
       {{"subjects", w.n_subjects()},
        {"objects", w.n_objects()},
        {"policies", w.policies.size()},
        {"requests", w.requests.size()}}}};
  io::write_text_file((root / "manifest.json").string(), manifest.dump(2) + "\n");
}

Workload read_workload(const std::string& dir) {
  const std::filesystem::path root(dir);
  const auto manifest = io::read_json_file((root / "manifest.json").string());
  Workload w;
  try {
    w.spec = case_spec_from_json(manifest.at("spec").dump());
    w.seed = manifest.at("seed").get<std::uint64_t>();
    w.scale = manifest.at("scale").get<double>();
    w.options.target_match_rate = manifest.value("target_match_rate", 0.5);
    w.options.n_operations = manifest.value("n_operations", 2u);
    w.options.min_credential = manifest.value("min_credential", 1u);
  } catch (const io::json::exception& e) {
    throw Error(Errc::corrupt_file, std::string("manifest: ") + e.what());
  }
  w.registry = Registry(io::load_attribute_space_file((root / "space.json").string()));
  for (const auto& line : io::read_jsonl_file((root / "population.jsonl").string())) {
    io::apply_population_line(w.registry, line);
  }
  for (const auto& p : io::read_json_file((root / "policies.json").string())) {
    w.policies.push_back(io::policy_from_json(p));
  }
  for (const auto& r : io::read_jsonl_file((root / "requests.jsonl").string())) {
    w.requests.push_back(io::request_from_json(r));
  }
  if (std::filesystem::exists(root / "keys.jsonl")) {
    for (const auto& k : io::read_jsonl_file((root / "keys.jsonl").string())) {
      w.subject_seeds.push_back(k.at("seed").get<std::string>());
    }
  }
  const auto& counts = manifest.at("counts");
  if (counts.at("subjects").get<std::size_t>() != w.n_subjects() ||
      counts.at("objects").get<std::size_t>() != w.n_objects() ||
      counts.at("policies").get<std::size_t>() != w.policies.size() ||
      counts.at("requests").get<std::size_t>() != w.requests.size()) {
    throw Error(Errc::corrupt_file, "workload counts disagree with manifest in " + dir);
  }
  return w;
}

}  // namespace qae

#pragma once

#include <string>
#include <vector>

#include "qae/crypto.hpp"
#include "qae/model.hpp"
#include "qae/optimizer.hpp"

namespace qae::testing {

inline crypto::KeyPair key_for(std::uint8_t tag) {
  crypto::Seed seed{};
  seed.fill(tag);
  return crypto::keygen(seed);
}

// dept in {eng, hr}, role in {dev, qa}; s1=(eng,dev) s2=(eng,dev) s3=(eng,qa) s4=(hr).
inline Registry micro_registry() {
  AttributeSpace space;
  space.add({"dept", AttrClass::subject, 1.0, {"eng", "hr"}});
  space.add({"role", AttrClass::subject, 1.0, {"dev", "qa"}});
  space.add({"doc", AttrClass::object, 1.0, {"spec", "plan"}});
  space.add({"op", AttrClass::operation, 1.0, {"read", "write"}});
  Registry reg(std::move(space));
  reg.register_subject({{"dept", "eng"}, {"role", "dev"}}, key_for(1).pk, "s1");
  reg.register_subject({{"dept", "eng"}, {"role", "dev"}}, key_for(2).pk, "s2");
  reg.register_subject({{"dept", "eng"}, {"role", "qa"}}, key_for(3).pk, "s3");
  reg.register_subject({{"dept", "hr"}}, key_for(4).pk, "s4");
  reg.register_object("o1", {{"doc", "spec"}});
  reg.register_object("o2", {{"doc", "plan"}});
  return reg;
}

// Attributes a..d with values a1.. as in the worked tree example.
inline AttributeSpace worked_space() {
  AttributeSpace space;
  space.add({"a", AttrClass::subject, 4.0, {"a1", "a2", "a3"}});
  space.add({"b", AttrClass::subject, 3.0, {"b1", "b2"}});
  space.add({"c", AttrClass::subject, 2.0, {"c1", "c2"}});
  space.add({"d", AttrClass::subject, 1.0, {"d1"}});
  return space;
}

inline std::vector<PolicyRule> worked_policies() {
  return {
      {"r1", {{"a", "a1"}, {"b", "b1"}, {"c", "c1"}}},
      {"r2", {{"a", "a2"}, {"b", "b1"}, {"c", "c1"}, {"d", "d1"}}},
      {"r3", {{"a", "a2"}, {"c", "c2"}}},
      {"r4", {{"a", "a3"}, {"b", "b2"}, {"c", "c2"}}},
  };
}

// Weight list with the given attribute order, heaviest first.
inline WeightList ordered_weights(const std::vector<std::string>& order,
                                  std::uint64_t version = 0) {
  std::vector<WeightEntry> entries;
  double w = static_cast<double>(order.size());
  for (const auto& name : order) entries.push_back({name, 0.0, 0.0, w--});
  return WeightList(std::move(entries), version);
}

inline AccessRequest make_request(const crypto::KeyPair& key, std::vector<AVPair> cred,
                                  std::string object, std::string op, std::uint64_t seq) {
  AccessRequest req;
  req.signed_credential = crypto::sign_credential(key, Credential(std::move(cred)));
  req.object_id = std::move(object);
  req.op = std::move(op);
  req.seq = seq;
  return req;
}

}  // namespace qae::testing

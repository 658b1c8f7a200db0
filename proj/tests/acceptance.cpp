// Acceptance gate: one PASS/FAIL line per primary criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "case_table.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "qae/anonymity.hpp"
#include "qae/bench.hpp"
#include "qae/entropy.hpp"
#include "qae/error.hpp"
#include "random_instance.hpp"

namespace qae {
namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

using Check = std::function<void(Verdict&)>;

std::vector<KeyId> keys_for(const AttributeSpace& space, const Ewpt& tree,
                            const std::vector<AVPair>& pairs) {
  std::vector<KeyId> keys;
  for (const auto& p : pairs) keys.push_back(space.key(p));
  return sort_keys(std::move(keys), tree.ranks());
}

// Worked tree example, at tree level and through the engine.
void worked_example(Verdict& o) {
  const auto space = testing::worked_space();
  const std::vector<AVPair> req{{"a", "a3"}, {"b", "b2"}, {"c", "c1"}};
  const auto w1 = testing::ordered_weights({"a", "b", "c", "d"});
  const auto w2 = testing::ordered_weights({"c", "b", "a", "d"});
  const auto t1 = build_tree(testing::worked_policies(), w1, space);
  const auto t2 = build_tree(testing::worked_policies(), w2, space);
  const auto m1 = match_strict(t1, keys_for(space, t1, req));
  const auto m2 = match_strict(t2, keys_for(space, t2, req));
  o.expect(!m1.matched && m1.comparisons == 5, "W1 comparisons " + std::to_string(m1.comparisons));
  o.expect(!m2.matched && m2.comparisons == 2, "W2 comparisons " + std::to_string(m2.comparisons));

  Registry reg(space);
  reg.register_subject(req, testing::key_for(1).pk);
  reg.register_object("o", {});
  EngineConfig cfg;
  cfg.threshold = 0.0;
  for (const auto& [w, expected] : {std::pair{w1, 5u}, std::pair{w2, 2u}}) {
    Engine engine(reg, testing::worked_policies(), cfg, Variant::fixed, w);
    const auto d = engine.authorize(testing::make_request(testing::key_for(1), req, "o", "", 1));
    o.expect(d.outcome == Outcome::deny && d.comparisons == expected,
             "engine comparisons " + std::to_string(d.comparisons));
  }
  o.note << "W1=" << m1.comparisons << " W2=" << m2.comparisons << ", both DENY";
}

void oracle_equivalence(Verdict& o) {
  std::mt19937_64 rng(20240601);
  std::size_t decisions = 0, spaces = 0, rts = 0;
  constexpr int kInstances = 1000;
  for (int trial = 0; trial < kInstances; ++trial) {
    const auto inst = testing::random_instance(rng);
    const auto& space = inst.registry.space();
    auto order = inst.attr_names;
    std::shuffle(order.begin(), order.end(), rng);
    const auto tree = build_tree(inst.policies, testing::ordered_weights(order), space);
    for (const auto& pairs : inst.request_pairs) {
      const auto seq = keys_for(space, tree, pairs);
      o.expect(match_strict(tree, seq).matched ==
                   linear_scan(inst.policies, pairs, ScanSemantics::exact),
               "strict mismatch in instance " + std::to_string(trial));
      o.expect(match_subset(tree, seq).matched ==
                   linear_scan(inst.policies, pairs, ScanSemantics::subset),
               "subset mismatch in instance " + std::to_string(trial));
      ++decisions;
    }

    const auto pop = testing::to_population(inst.registry, inst.history);
    for (std::size_t i = 0; i < pop.ids.size(); ++i) {
      const auto& pairs = inst.registry.subjects()[i].pairs;
      std::vector<AVPair> partial;
      for (const auto& p : pairs) {
        if (partial.empty() || rng() % 2) partial.push_back(p);
      }
      for (const auto& cred : {pairs, partial}) {
        const auto got = subject_space(Credential(cred), inst.registry, inst.history);
        const auto want = oracle::space_weights(pop, testing::to_set(cred));
        o.expect(got.members == want, "SS_c mismatch in instance " + std::to_string(trial));
        o.expect(std::abs(request_entropy(got) - oracle::entropy(want)) <= 1e-9,
                 "E_req mismatch in instance " + std::to_string(trial));
        ++spaces;
      }
    }
    for (std::size_t t = 1; t <= 6; ++t) {
      const long r = oracle::rt_r(pop, t);
      if (r < 0) continue;
      o.expect(static_cast<long>(rt_anonymity(inst.registry, inst.history, t).r) == r,
               "r mismatch in instance " + std::to_string(trial));
      ++rts;
    }
  }
  o.note << kInstances << " instances, " << decisions << " requests x 2 modes, " << spaces
         << " subject spaces, " << rts << " r values";
}

void entropy_identities(Verdict& o) {
  for (int n = 2; n <= 64; ++n) {
    SubjectSpace s;
    for (int i = 0; i < n; ++i) s.members["s" + std::to_string(i)] = 1;
    o.expect(std::abs(request_entropy(s) - std::log2(double(n))) <= 1e-9,
             "uniform N=" + std::to_string(n));
  }
  SubjectSpace single;
  single.members["s"] = 4;
  o.expect(request_entropy(single) == 0.0, "singleton not exactly 0");

  SubjectSpace weighted;
  weighted.members = {{"s1", 3}, {"s2", 1}};
  const double e = request_entropy(weighted);
  o.expect(std::abs(e - 0.8112781) <= 1e-6, "weighted (3,1)");

  AAHPool pool;
  for (std::uint64_t seq = 1; seq <= 4; ++seq) {
    pool.record({{}, seq <= 3 ? Outcome::grant : Outcome::deny, seq});
  }
  const double h = decision_entropy(pool);
  o.expect(std::abs(h - 0.8112781) <= 1e-6 && std::abs(h - e) <= 1e-15, "pool H(D)");
  char buf[96];
  std::snprintf(buf, sizeof buf, "E(3,1)=%.7f H(D)=%.7f", e, h);
  o.note << buf;
}

void monotonicity(Verdict& o) {
  std::mt19937_64 rng(77);
  std::size_t pairs_checked = 0;
  const Ledger empty;
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testing::random_instance(rng, 1);
    const auto& reg = inst.registry;
    std::size_t prev = 0;
    for (std::size_t t = 1;; ++t) {
      std::size_t r = 0;
      try {
        r = rt_anonymity(reg, empty, t).r;
      } catch (const Error&) {
        break;
      }
      o.expect(r >= prev, "r(t) decreased in matrix " + std::to_string(trial));
      prev = r;
    }
    for (int k = 0; k < 20; ++k) {
      const auto& s = reg.subjects()[rng() % reg.subject_count()];
      std::vector<AVPair> c, c_sub;
      for (const auto& p : s.pairs) {
        if (c.empty() || rng() % 2) c.push_back(p);
      }
      for (const auto& p : c) {
        if (c_sub.empty() || rng() % 2) c_sub.push_back(p);
      }
      const auto big = subject_space(Credential(c), reg, empty);
      const auto small = subject_space(Credential(c_sub), reg, empty);
      o.expect(small.size() >= big.size(), "|SS| not antitone in matrix " + std::to_string(trial));
      o.expect(request_entropy(small) >= request_entropy(big),
               "entropy order in matrix " + std::to_string(trial));
      ++pairs_checked;
    }
  }
  o.note << "100 matrices, " << pairs_checked << " credential pairs";
}

void crypto_checks(Verdict& o) {
  const auto k1 = testing::key_for(1);
  const auto k2 = testing::key_for(2);
  const Credential c({{"dept", "eng"}, {"role", "dev"}});
  const auto a = crypto::sign_credential(k1, c);
  const auto b = crypto::sign_credential(k1, c);
  o.expect(a.signature == b.signature, "signatures differ");
  o.expect(crypto::verify_credential(k1.pk, a), "valid signature rejected");
  auto tampered = a;
  tampered.credential = Credential(std::vector<AVPair>{{"dept", "hr"}, {"role", "dev"}});
  o.expect(!crypto::verify_credential(k1.pk, tampered), "tampered credential accepted");
  o.expect(!crypto::verify_credential(k2.pk, a), "wrong key accepted");

  const auto reg = testing::micro_registry();
  Engine engine(reg, {{"p", {{"dept", "eng"}}}}, EngineConfig{}, Variant::full);
  auto req = testing::make_request(k1, {{"dept", "eng"}}, "o1", "read", 1);
  req.signed_credential.credential = Credential(std::vector<AVPair>{{"dept", "hr"}});
  const auto d = engine.authorize(req);
  o.expect(d.reason == Reason::bad_signature && !d.entropy.has_value() && d.comparisons == 0,
           "tampered request not stopped at the signature step");
  o.note << "deterministic, tamper/wrong-key rejected, tampered request -> "
         << to_string(d.reason) << " without entropy";
}

// One object attribute decides denial outright but starts with the lowest
// initial weight.
Workload skew_workload() {
  AttributeSpace space;
  space.add({"role", AttrClass::subject, 4.0, {"dev", "qa", "ops"}});
  space.add({"dept", AttrClass::subject, 3.0, {"eng", "hr"}});
  space.add({"op", AttrClass::operation, 2.0, {"read", "write"}});
  space.add({"zone", AttrClass::object, 0.1, {"public", "restricted"}});
  Workload w;
  w.spec.name = "skew";
  w.registry = Registry(space);
  std::vector<crypto::KeyPair> keys;
  const char* roles[] = {"dev", "qa", "ops"};
  const char* depts[] = {"eng", "hr"};
  for (int i = 0; i < 24; ++i) {
    keys.push_back(testing::key_for(static_cast<std::uint8_t>(i + 1)));
    w.registry.register_subject({{"role", roles[i % 3]}, {"dept", depts[(i / 3) % 2]}},
                                keys.back().pk);
  }
  w.registry.register_object("pub", {{"zone", "public"}});
  w.registry.register_object("sec", {{"zone", "restricted"}});
  int id = 0;
  for (const char* r : roles) {
    for (const char* d : depts) {
      for (const char* op : {"read", "write"}) {
        char name[16];
        std::snprintf(name, sizeof name, "r%02d", id++);
        w.policies.push_back({name, {{"dept", d}, {"op", op}, {"role", r}, {"zone", "public"}}});
      }
    }
  }
  std::mt19937_64 rng(6);
  for (std::uint64_t seq = 1; seq <= 2000; ++seq) {
    const auto i = rng() % keys.size();
    const auto& s = w.registry.subjects()[i];
    w.requests.push_back(testing::make_request(keys[i], s.pairs, rng() % 2 ? "pub" : "sec",
                                               rng() % 2 ? "read" : "write", seq));
  }
  return w;
}

void optimization_effect(Verdict& o) {
  const auto w = skew_workload();
  EngineConfig cfg;
  cfg.update_interval = w.requests.size() / 2 + 1;
  const auto full = replay(w, Variant::full, cfg);
  const auto fixed = replay(w, Variant::fixed, cfg);
  o.expect(full.rebuilds == 1, "expected one rebuild, got " + std::to_string(full.rebuilds));
  o.expect(full.result.comparisons_avg < fixed.result.comparisons_avg,
           "full comparisons_avg not below static");
  bool same = true;
  for (std::size_t i = 0; i < full.decisions.size(); ++i) {
    same = same && full.decisions[i].outcome == fixed.decisions[i].outcome;
  }
  o.expect(same, "decisions differ between variants");

  Engine engine(w.registry, w.policies, cfg, Variant::full);
  for (std::size_t i = 0; i < cfg.update_interval; ++i) engine.authorize(w.requests[i]);
  const auto weights = engine.snapshot()->weights;
  o.expect(weights.rank_of("zone") == 0u, "predictive attribute not ranked first");
  char buf[160];
  std::snprintf(buf, sizeof buf, "comparisons_avg full=%.3f static=%.3f, zone rank %zu -> %zu",
                full.result.comparisons_avg, fixed.result.comparisons_avg,
                *WeightList::initial(w.registry.space()).rank_of("zone"), *weights.rank_of("zone"));
  o.note << buf;
}

void relative_performance(Verdict& o) {
  const auto w = generate(case_spec("C2"), 42, 0.01);
  o.expect(w.n_subjects() == 100 && w.policies.size() == 5 && w.requests.size() == 10000,
           "C2 scaled counts");
  const EngineConfig cfg;
  const auto full = replay(w, Variant::full, cfg);
  const auto fixed = replay(w, Variant::fixed, cfg);
  const auto linear = replay(w, Variant::linear, cfg);
  bool same = true;
  for (std::size_t i = 0; i < full.decisions.size(); ++i) {
    same = same && full.decisions[i].outcome == linear.decisions[i].outcome &&
           fixed.decisions[i].outcome == linear.decisions[i].outcome;
  }
  o.expect(same, "decisions differ across variants");
  const double ratio = full.result.throughput_tps / linear.result.throughput_tps;
  o.expect(ratio >= 3.0, "full/linear throughput ratio below 3");
  char buf[200];
  std::snprintf(buf, sizeof buf, "tps full=%.0f static=%.0f linear=%.0f (full/linear=%.2fx), "
                "comparisons full=%.2f linear=%.2f",
                full.result.throughput_tps, fixed.result.throughput_tps,
                linear.result.throughput_tps, ratio, full.result.comparisons_avg,
                linear.result.comparisons_avg);
  o.note << buf;
}

void table_fidelity(Verdict& o) {
  for (const auto& row : testing::kCaseTable) {
    const auto s = case_spec(row.name);
    o.expect(s.n_subjects == row.subjects && s.n_objects == row.objects &&
                 s.n_requests == row.requests && s.n_policies == row.policies &&
                 s.value_range == row.value_range && s.n_subject_attrs == row.sub_attrs &&
                 s.n_object_attrs == row.obj_attrs,
             std::string("row ") + row.name);
    constexpr double scale = 0.001;
    const auto w = generate(s, 1, scale);
    auto want = [](double n, std::uint64_t guard) {
      return std::max<std::uint64_t>(guard, static_cast<std::uint64_t>(std::llround(n * scale)));
    };
    o.expect(w.n_subjects() == want(double(row.subjects), 10) &&
                 w.n_objects() == want(double(row.objects), 10) &&
                 w.requests.size() == want(double(row.requests), 100) &&
                 w.policies.size() == want(double(row.policies), 5),
             std::string("scaled counts ") + row.name);
    const auto& space = w.registry.space();
    o.expect(space.of_class(AttrClass::subject).size() == row.sub_attrs &&
                 space.of_class(AttrClass::object).size() == row.obj_attrs,
             std::string("attribute counts ") + row.name);
    const auto again = generate(s, 1, scale);
    o.expect(again.requests == w.requests && again.policies == w.policies &&
                 again.registry == w.registry,
             std::string("regeneration ") + row.name);
  }
  const auto c2 = generate(case_spec("C2"), 9, 0.01);
  o.expect(c2.n_subjects() == 100 && c2.n_objects() == 100 && c2.requests.size() == 10000 &&
               c2.policies.size() == 5,
           "C2 at 0.01");
  o.note << "15 rows exact, scaled counts and guards honoured, regeneration identical";
}

}  // namespace
}  // namespace qae

int main() {
  using qae::Check;
  const std::vector<std::tuple<int, const char*, double, Check>> checks{
      {1, "worked tree example", 1.0, qae::worked_example},
      {2, "oracle equivalence", 60.0, qae::oracle_equivalence},
      {3, "entropy identities", 0.0, qae::entropy_identities},
      {4, "monotonicity laws", 0.0, qae::monotonicity},
      {5, "credential crypto", 0.0, qae::crypto_checks},
      {6, "dynamic optimization effect", 0.0, qae::optimization_effect},
      {7, "relative performance", 300.0, qae::relative_performance},
      {8, "case table fidelity", 0.0, qae::table_fidelity},
  };
  int failures = 0;
  for (const auto& [id, name, budget_s, fn] : checks) {
    qae::Verdict o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_s > 0.0) o.expect(secs < budget_s, "runtime over budget");
    std::printf("%s criterion %d (%s): %s [%.2fs]\n", o.ok ? "PASS" : "FAIL", id, name,
                o.note.str().c_str(), secs);
    std::fflush(stdout);
    if (!o.ok) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failures,
              checks.size());
  return failures == 0 ? 0 : 1;
}

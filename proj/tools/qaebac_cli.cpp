// qaebac: command-line front end for the access-control engine, the workload
// generator and the benchmark harness.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qae/bench.hpp"
#include "qae/error.hpp"
#include "qae/io.hpp"

namespace {

using qae::io::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QAE_SEED")) return std::stoull(env);
  return 42;
}

std::vector<std::uint8_t> parse_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) throw qae::Error(qae::Errc::bad_seed, "odd-length hex");
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
  } else {
    qae::io::write_text_file(path, text);
  }
}

struct BenchArgs {
  std::string case_name = "C2";
  std::string variant = "full";
  int runs = 10;
  double scale = 0.01;
  std::uint64_t seed = 0;
  std::string csv;
  std::string workload;
  double threshold = 1.0;
  std::string mode = "strict";
  std::uint64_t update_interval = 1000;
  std::size_t pool_capacity = qae::AAHPool::kDefaultCapacity;
  bool raw_anonymity = false;
};

qae::EngineConfig engine_config(double threshold, const std::string& mode, std::uint64_t k,
                                std::size_t pool, bool raw) {
  qae::EngineConfig cfg;
  cfg.threshold = threshold;
  cfg.mode = qae::parse_match_mode(mode);
  cfg.update_interval = k;
  cfg.pool_capacity = pool;
  cfg.anonymity_term = raw ? qae::AnonymityTerm::raw_global_r : qae::AnonymityTerm::normalized;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantifiable-anonymity attribute-based access control"};
  app.require_subcommand(1);

  // init
  std::string init_space, init_out;
  auto* init = app.add_subcommand("init", "Validate an attribute-space document");
  init->add_option("--space", init_space, "attribute-space JSON")->required();
  init->add_option("--out", init_out, "write an empty state file");

  // gen
  std::string gen_case = "C2", gen_out;
  std::uint64_t gen_seed = default_seed();
  double gen_scale = 0.01, gen_match = 0.5;
  auto* gen = app.add_subcommand("gen", "Generate a workload directory");
  gen->add_option("--case", gen_case, "C1..C15")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--scale", gen_scale)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--target-match-rate", gen_match);
  gen->add_option("--out", gen_out, "output directory")->required();

  // keygen
  std::string keygen_seed, keygen_out;
  auto* keygen = app.add_subcommand("keygen", "Create an Ed25519 keypair");
  keygen->add_option("--seed", keygen_seed, "32-byte seed as 64 hex digits");
  keygen->add_option("--out", keygen_out);

  // sign
  std::string sign_key, sign_request, sign_out;
  auto* sign = app.add_subcommand("sign", "Sign the credential of an unsigned request");
  sign->add_option("--key", sign_key, "key file from keygen")->required();
  sign->add_option("--request", sign_request, "request JSON")->required();
  sign->add_option("--out", sign_out);

  // authz
  std::string authz_workload, authz_request, authz_mode = "strict";
  double authz_threshold = 1.0;
  auto* authz = app.add_subcommand("authz", "Authorize one request file");
  authz->add_option("--workload", authz_workload, "workload directory")->required();
  authz->add_option("--request", authz_request, "signed request JSON")->required();
  authz->add_option("--threshold", authz_threshold);
  authz->add_option("--mode", authz_mode)->check(CLI::IsMember({"strict", "subset"}));

  // bench
  BenchArgs b;
  b.seed = default_seed();
  auto* bench = app.add_subcommand("bench", "Replay a case through an engine variant");
  bench->add_option("--case", b.case_name);
  bench->add_option("--variant", b.variant);
  bench->add_option("--runs", b.runs)->check(CLI::PositiveNumber);
  bench->add_option("--scale", b.scale);
  bench->add_option("--seed", b.seed);
  bench->add_option("--csv", b.csv);
  bench->add_option("--workload", b.workload, "replay a generated workload instead");
  bench->add_option("--threshold", b.threshold);
  bench->add_option("--mode", b.mode)->check(CLI::IsMember({"strict", "subset"}));
  bench->add_option("--update-interval", b.update_interval)->check(CLI::PositiveNumber);
  bench->add_option("--pool-capacity", b.pool_capacity)->check(CLI::PositiveNumber);
  bench->add_flag("--raw-anonymity", b.raw_anonymity, "use the global r as anonymity term");

  // report
  std::vector<std::string> report_cases;
  std::string report_out;
  double report_scale = 0.01;
  std::uint64_t report_seed = default_seed();
  auto* report = app.add_subcommand("report", "Anonymity report CSV");
  report->add_option("--case", report_cases, "cases (default: all)");
  report->add_option("--scale", report_scale);
  report->add_option("--seed", report_seed);
  report->add_option("--out", report_out);

  // snapshot / load
  std::string snap_workload, snap_out, snap_variant = "full";
  bool snap_replay = false;
  auto* snap = app.add_subcommand("snapshot", "Write a workload's state to a state file");
  snap->add_option("--workload", snap_workload)->required();
  snap->add_option("--out", snap_out)->required();
  snap->add_flag("--replay", snap_replay, "replay the request stream into the ledger first");
  snap->add_option("--variant", snap_variant);

  std::string load_in;
  auto* load = app.add_subcommand("load", "Load a state file and print its counts");
  load->add_option("--in", load_in)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*init) {
      qae::State state{qae::Registry(qae::io::load_attribute_space_file(init_space)), {}};
      std::cout << json{{"attributes", state.registry.space().size()}}.dump() << '\n';
      if (!init_out.empty()) qae::snapshot(state, init_out);
    } else if (*gen) {
      qae::GenOptions opt;
      opt.target_match_rate = gen_match;
      const auto w = qae::generate(qae::case_spec(gen_case), gen_seed, gen_scale, opt);
      qae::write_workload(w, gen_out);
      std::cout << json{{"case", gen_case},
                        {"subjects", w.n_subjects()},
                        {"objects", w.n_objects()},
                        {"policies", w.policies.size()},
                        {"requests", w.requests.size()},
                        {"match_rate", qae::subset_match_rate(w)}}
                       .dump()
                << '\n';
    } else if (*keygen) {
      qae::crypto::KeyPair kp;
      if (keygen_seed.empty()) {
        kp = qae::crypto::keygen();
      } else {
        const auto seed = parse_hex(keygen_seed);
        kp = qae::crypto::keygen(std::span<const std::uint8_t>(seed));
      }
      emit(json{{"scheme", qae::crypto::KeyPair::scheme},
                {"pk", qae::crypto::base64_encode(kp.pk)},
                {"seed", qae::crypto::base64_encode(kp.seed)}}
                   .dump() +
               "\n",
           keygen_out);
    } else if (*sign) {
      const auto key = qae::io::read_json_file(sign_key);
      const auto seed = qae::crypto::base64_decode_fixed<32>(key.at("seed").get<std::string>());
      const auto kp = qae::crypto::keygen(std::span<const std::uint8_t>(seed));
      auto req = qae::io::read_json_file(sign_request);
      const qae::Credential c(qae::io::pairs_from_json(req.at("credential")));
      const auto sc = qae::crypto::sign_credential(kp, c);
      req["signature"] = qae::crypto::base64_encode(sc.signature);
      req["signer_pk"] = qae::crypto::base64_encode(sc.signer_pk);
      if (!req.contains("env")) req["env"] = json::object();
      emit(req.dump() + "\n", sign_out);
    } else if (*authz) {
      const auto w = qae::read_workload(authz_workload);
      const auto req = qae::io::request_from_json(qae::io::read_json_file(authz_request));
      qae::Engine engine(w.registry, w.policies,
                         engine_config(authz_threshold, authz_mode, 1000,
                                       qae::AAHPool::kDefaultCapacity, false),
                         qae::Variant::fixed);
      const auto d = engine.authorize(req);
      std::cout << qae::decision_json(d, engine.variant()) << '\n';
    } else if (*bench) {
      const auto cfg =
          engine_config(b.threshold, b.mode, b.update_interval, b.pool_capacity, b.raw_anonymity);
      const auto variant = qae::parse_variant(b.variant);
      const auto w = b.workload.empty()
                         ? qae::generate(qae::case_spec(b.case_name), b.seed, b.scale)
                         : qae::read_workload(b.workload);
      const auto res = qae::run_workload(w, variant, b.runs, cfg);
      const auto rows = res.rows();
      const auto csv = qae::bench_csv(rows);
      if (b.csv.empty()) {
        std::cout << csv;
      } else {
        qae::export_csv(csv, b.csv);
        std::cout << qae::bench_csv(std::span(&res.mean, 1));
      }
    } else if (*report) {
      if (report_cases.empty()) {
        for (const auto& c : qae::all_cases()) report_cases.push_back(c.name);
      }
      std::vector<qae::AnonymityReport> reports;
      for (const auto& name : report_cases) {
        const auto w = qae::generate(qae::case_spec(name), report_seed, report_scale);
        reports.push_back(qae::anonymity_report(w));
      }
      const auto csv = qae::anonymity_csv(reports);
      if (report_out.empty()) {
        std::cout << csv;
      } else {
        qae::export_csv(csv, report_out);
      }
    } else if (*snap) {
      const auto w = qae::read_workload(snap_workload);
      qae::State state{w.registry, {}};
      if (snap_replay) {
        qae::Engine engine(w.registry, w.policies, qae::EngineConfig{},
                           qae::parse_variant(snap_variant));
        for (const auto& r : w.requests) engine.authorize(r);
        state.ledger = engine.ledger();
      }
      qae::snapshot(state, snap_out);
      std::cout << json{{"subjects", state.registry.subject_count()},
                        {"objects", state.registry.object_count()},
                        {"history", state.ledger.size()}}
                       .dump()
                << '\n';
    } else if (*load) {
      const auto state = qae::load(load_in);
      std::cout << json{{"attributes", state.registry.space().size()},
                        {"subjects", state.registry.subject_count()},
                        {"objects", state.registry.object_count()},
                        {"history", state.ledger.size()}}
                       .dump()
                << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "qaebac: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

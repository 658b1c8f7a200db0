#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "qae/crypto.hpp"
#include "qae/io.hpp"

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(QAEBAC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("qae_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

TEST(CliTest, UnknownFlagIsUsageError) {
  EXPECT_EQ(run("bench --no-such-flag").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
}

TEST(CliTest, RuntimeErrorExitsOne) {
  EXPECT_EQ(run("bench --case C16 --scale 0.001").exit_code, 1);
}

TEST(CliTest, TamperedRequestIsDeniedNotFailed) {
  const auto dir = fresh_dir("authz");
  ASSERT_EQ(run("gen --case C2 --scale 0.001 --seed 3 --out " + (dir / "w").string()).exit_code, 0);
  const auto lines = qae::io::read_jsonl_file((dir / "w" / "requests.jsonl").string());
  ASSERT_FALSE(lines.empty());
  auto req = lines.front();
  auto sig = qae::crypto::base64_decode(req.at("signature").get<std::string>());
  sig[0] ^= 0x80;
  req["signature"] = qae::crypto::base64_encode(sig);
  qae::io::write_text_file((dir / "tampered.json").string(), req.dump());
  qae::io::write_text_file((dir / "clean.json").string(), lines.front().dump());

  const auto bad = run("authz --workload " + (dir / "w").string() + " --request " +
                       (dir / "tampered.json").string());
  EXPECT_EQ(bad.exit_code, 0);
  const auto decision = qae::io::json::parse(bad.out);
  EXPECT_EQ(decision.at("outcome"), "DENY");
  EXPECT_EQ(decision.at("reason"), "bad-signature");

  const auto good = run("authz --workload " + (dir / "w").string() + " --request " +
                        (dir / "clean.json").string());
  EXPECT_EQ(good.exit_code, 0);
  EXPECT_NE(qae::io::json::parse(good.out).at("reason"), "bad-signature");
  std::filesystem::remove_all(dir);
}

TEST(CliTest, BenchWritesCsv) {
  const auto dir = fresh_dir("bench");
  const auto csv = (dir / "out.csv").string();
  ASSERT_EQ(run("bench --case C2 --variant full --runs 10 --scale 0.01 --csv " + csv).exit_code, 0);
  std::ifstream in(csv);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 12u);
  std::filesystem::remove_all(dir);
}

TEST(CliTest, KeygenSnapshotLoad) {
  const auto dir = fresh_dir("state");
  EXPECT_EQ(run("keygen --seed " + std::string(64, 'a') + " --out " + (dir / "k.json").string())
                .exit_code,
            0);
  ASSERT_EQ(run("gen --case C8 --scale 0.001 --out " + (dir / "w").string()).exit_code, 0);
  ASSERT_EQ(run("snapshot --replay --workload " + (dir / "w").string() + " --out " +
                (dir / "s.jsonl").string())
                .exit_code,
            0);
  const auto loaded = run("load --in " + (dir / "s.jsonl").string());
  EXPECT_EQ(loaded.exit_code, 0);
  EXPECT_NE(loaded.out.find("1000"), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace

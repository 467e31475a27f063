// End-to-end tests driving the installed binary: exit codes, JSON output and
// byte-level determinism of the power table. The binary path arrives in
// RANDTEST_CLI (set by ctest); the shipped manifest via RANDTEST_SOURCE_DIR.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "randtest/engine.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_path() {
  const char* env = std::getenv("RANDTEST_CLI");
  REQUIRE_MESSAGE(env != nullptr, "RANDTEST_CLI must point at the binary");
  return env;
}

std::string source_dir() {
  const char* env = std::getenv("RANDTEST_SOURCE_DIR");
  REQUIRE_MESSAGE(env != nullptr, "RANDTEST_SOURCE_DIR must point at the repo root");
  return env;
}

RunResult run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    result.output += buffer.data();
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("test subcommand: denominators follow the declared scheme") {
  const std::string csv = "id,w,y\n"
                          "u1,1,2.1\nu2,1,0.3\nu3,1,1.7\nu4,1,2.9\n"
                          "u5,0,0.4\nu6,0,1.1\nu7,0,0.2\nu8,0,0.8\n";
  write_file("/tmp/randtest_cli_balanced.csv", csv);

  auto fb = run("test --data /tmp/randtest_cli_balanced.csv --scheme forced-balance "
                "--stat centered-diff --alpha 0.05");
  CHECK(fb.exit_code == 0);
  auto j = nlohmann::json::parse(fb.output);
  CHECK(j["p"]["den"] == 70);

  auto nc = run("test --data /tmp/randtest_cli_balanced.csv --scheme bernoulli-nc "
                "--stat centered-diff --alpha 0.05");
  CHECK(nc.exit_code == 0);
  CHECK(nlohmann::json::parse(nc.output)["p"]["den"] == 254);

  // the report JSON round-trips through the library type
  const auto report = randtest::TestReport::from_json(j);
  CHECK(report.to_json() == j);
}

TEST_CASE("test subcommand: design violation and parse failures") {
  write_file("/tmp/randtest_cli_unbal.csv",
             "id,w,y\nu1,1,2.1\nu2,1,0.3\nu3,1,1.7\nu4,0,2.9\n"
             "u5,0,0.4\nu6,0,1.1\nu7,0,0.2\nu8,0,0.8\n");
  CHECK(run("test --data /tmp/randtest_cli_unbal.csv --scheme forced-balance --alpha 0.05")
            .exit_code == 3);

  write_file("/tmp/randtest_cli_bad.csv", "id,treat,y\nu1,1,2.1\n");
  CHECK(run("test --data /tmp/randtest_cli_bad.csv --scheme forced-balance --alpha 0.05")
            .exit_code == 2);

  CHECK(run("test --data /nonexistent.csv --scheme forced-balance --alpha 0.05").exit_code == 2);
}

TEST_CASE("group-check subcommand") {
  auto flips = run("group-check --group sign-flips:3");
  CHECK(flips.exit_code == 0);
  CHECK(nlohmann::json::parse(flips.output)["is_group"] == true);

  auto balanced = run("group-check --group balanced-perms:2,2");
  CHECK(balanced.exit_code == 4);
  const auto j = nlohmann::json::parse(balanced.output);
  CHECK(j["is_group"] == false);
  CHECK(j["has_identity"] == false);
  CHECK(!j["closure_witnesses"].empty());

  CHECK(run("group-check --group perms:3").exit_code == 0);
  CHECK(run("group-check --group cyclic:2,3,1").exit_code == 0);
  CHECK(run("group-check --group nonsense").exit_code == 2);
}

TEST_CASE("group-check from an element file") {
  // the 3-cycles plus identity form a group; dropping the identity breaks it
  write_file("/tmp/randtest_cli_group.json",
             R"({"kind": "permutation", "elements": [[1,2,3],[2,3,1],[3,1,2]]})");
  CHECK(run("group-check --file /tmp/randtest_cli_group.json").exit_code == 0);

  write_file("/tmp/randtest_cli_nogroup.json",
             R"({"kind": "permutation", "elements": [[2,3,1],[3,1,2]]})");
  auto result = run("group-check --file /tmp/randtest_cli_nogroup.json");
  CHECK(result.exit_code == 4);
  CHECK(nlohmann::json::parse(result.output)["has_identity"] == false);

  CHECK(run("group-check --file /tmp/missing.json").exit_code == 2);
}

TEST_CASE("scheme-info subcommand") {
  auto info = run("scheme-info --name forced-balance --n 8");
  CHECK(info.exit_code == 0);
  const auto j = nlohmann::json::parse(info.output);
  CHECK(j["patterns"] == 70);
  CHECK(j["min_p"]["num"] == 1);
  CHECK(j["min_p"]["den"] == 70);

  CHECK(run("scheme-info --name bernoulli-nc --n 8").output.find("254") != std::string::npos);
  CHECK(run("scheme-info --name forced-balance --n 7").exit_code == 2);
}

TEST_CASE("ltt subcommand reproduces the tea-experiment numbers") {
  auto result = run("ltt --m 4 --truth 10101010 --guess 10101010 --alpha 0.0143");
  CHECK(result.exit_code == 0);
  const auto j = nlohmann::json::parse(result.output);
  CHECK(j["report"]["reject"] == true);
  CHECK(j["report"]["p"]["num"] == 1);
  CHECK(j["report"]["p"]["den"] == 70);
  CHECK(j["outcome"]["correct_milk_first"] == 4);

  CHECK(run("ltt --m 3 --truth 10101010 --guess 10101010 --alpha 0.05").exit_code == 2);
}

TEST_CASE("power subcommand: reproducible bytes, seed required") {
  const std::string manifest = source_dir() + "/paper.toml";
  const std::string base = "power --config " + manifest + " --replications 400 --seed 9";

  const auto first = run(base);
  CHECK(first.exit_code == 0);
  CHECK(first.output.rfind("test,alpha,size,power,se_size,se_power\n", 0) == 0);

  const auto again = run(base);
  const auto parallel = run(base + " --workers 4");
  CHECK(first.output == again.output);
  CHECK(first.output == parallel.output);

  CHECK(run("power --config " + manifest).exit_code == 2);  // --seed is mandatory
  CHECK(run("power --seed 1 --n 30 --replications 5").exit_code == 5);
}

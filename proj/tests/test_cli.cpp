#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using std::filesystem::path;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI binary with stderr folded into stdout.
RunResult run_cli(const std::string& args) {
  const std::string command =
      std::string(CREDITNET_CLI_BIN) + " " + args + " 2>&1";
  std::array<char, 4096> buffer{};
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr)
    result.output += buffer.data();
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  path dir;
  explicit TempDir(const std::string& name)
      : dir(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string sub(const std::string& name) const {
    return (dir / name).string();
  }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate, clear, cycles and compress compose") {
  TempDir dir("creditnet_cli_pipeline");
  const std::string net = dir.sub("net.json");

  auto generated = run_cli("generate --topology erdos_renyi --seed 5 -o " + net);
  CHECK(generated.exit_code == 0);
  REQUIRE(std::filesystem::exists(net));

  auto cleared = run_cli("clear -i " + net);
  CHECK(cleared.exit_code == 0);
  CHECK(cleared.output.find("\"converged\": true") != std::string::npos);

  auto cycles = run_cli("cycles -i " + net + " -o " + dir.sub("cycles.json"));
  CHECK(cycles.exit_code == 0);

  auto compressed = run_cli("compress -i " + net + " --all --seed 3 -o " +
                            dir.sub("compressed.json") + " --report " +
                            dir.sub("report.json"));
  CHECK(compressed.exit_code == 0);
  CHECK(std::filesystem::exists(dir.sub("compressed.json")));
  CHECK(std::filesystem::exists(dir.sub("report.json")));

  auto strategized = run_cli("strategize -i " + net +
                             " --strategy greedy --evaluate");
  CHECK(strategized.exit_code == 0);
  CHECK(strategized.output.find("post_total") != std::string::npos);
}

TEST_CASE("remove validates its edges") {
  TempDir dir("creditnet_cli_remove");
  const std::string net = dir.sub("net.json");
  {
    std::ofstream out(net);
    out << R"({"labels": ["a", "b"], "external_assets": [1, 1],
               "liabilities": [[0, 5], [0, 0]]})";
  }
  CHECK(run_cli("remove -i " + net + " --edge 0,1").exit_code == 0);
  const auto missing = run_cli("remove -i " + net + " --edge 1,0");
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("NoSuchDebt") != std::string::npos);
}

TEST_CASE("validation failures exit with code 2") {
  const auto bad = run_cli("clear -i /nonexistent/net.json");
  CHECK(bad.exit_code == 5);  // io error
  TempDir dir("creditnet_cli_bad");
  const std::string net = dir.sub("bad.json");
  {
    std::ofstream out(net);
    out << R"({"labels": ["a"], "external_assets": [-1], "liabilities": [[0]]})";
  }
  const auto invalid = run_cli("clear -i " + net);
  CHECK(invalid.exit_code == 2);
}

TEST_CASE("translate reports anomaly halts with exit code 3") {
  TempDir dir("creditnet_cli_translate");
  const std::string net = dir.sub("net.json");
  REQUIRE(run_cli("generate --topology isolated_blocks --seed 8 -o " + net)
              .exit_code == 0);
  REQUIRE(run_cli("render-statements -i " + net + " -o " + dir.sub("clean") +
                  " --seed 1")
              .exit_code == 0);
  const auto clean = run_cli("translate --corpus " + dir.sub("clean") +
                             " --client mock -o " + dir.sub("clean_out"));
  CHECK(clean.exit_code == 0);
  CHECK(clean.output.find("success") != std::string::npos);

  REQUIRE(run_cli("render-statements -i " + net + " -o " + dir.sub("bad") +
                  " --seed 1 --inject-conflict")
              .exit_code == 0);
  const auto halted = run_cli("translate --corpus " + dir.sub("bad") +
                              " --client mock -o " + dir.sub("bad_out"));
  CHECK(halted.exit_code == 3);
  CHECK(halted.output.find("anomaly detected at index") != std::string::npos);

  const auto aggregated = run_cli("aggregate --records " + dir.sub("bad"));
  CHECK(aggregated.exit_code == 3);
}

TEST_CASE("experiment runs from flags and reruns from its manifest") {
  TempDir dir("creditnet_cli_experiment");
  const std::string spec = dir.sub("spec.json");
  {
    std::ofstream out(spec);
    out << R"({
      "seed": 9,
      "operation": "compression",
      "topologies": [{"kind": "erdos_renyi", "n": 5}],
      "instances_per_topology": 2,
      "strategies": ["none", "greedy", "oracle"],
      "oracle_caps": {"max_candidates": 10, "truncate_on_overflow": true}
    })";
  }
  const auto first =
      run_cli("experiment --spec " + spec + " -o " + dir.sub("run1"));
  CHECK(first.exit_code == 0);
  const auto second = run_cli("experiment --spec " + dir.sub("run1") +
                              "/manifest.json -o " + dir.sub("run2") +
                              " --jobs 3");
  CHECK(second.exit_code == 0);

  std::ifstream a(dir.sub("run1") + "/results.csv"),
      b(dir.sub("run2") + "/results.csv");
  const std::string text_a((std::istreambuf_iterator<char>(a)),
                           std::istreambuf_iterator<char>());
  const std::string text_b((std::istreambuf_iterator<char>(b)),
                           std::istreambuf_iterator<char>());
  CHECK(text_a == text_b);
}

TEST_CASE("version flag prints the tool version") {
  const auto result = run_cli("--version");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("creditnet") != std::string::npos);
}

TEST_CASE("unknown flags exit nonzero") {
  CHECK(run_cli("clear --definitely-not-a-flag").exit_code != 0);
}

}  // TEST_SUITE

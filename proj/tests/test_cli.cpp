// End-to-end checks of the command-line tool: exit codes, report schema,
// frozen values, and the config round-trip guarantee.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using json = nlohmann::ordered_json;

namespace {

struct RunResult {
  int exit_code = -1;
  json report;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(SCHOTTKY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  if (!out.empty()) r.report = json::parse(out);
  return r;
}

std::string config(const std::string& name) {
  return std::string(SCHOTTKY_CONFIG_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("validate: cyclic config is valid, exit 0") {
  const auto r = run_cli("validate --config " + config("cyclic.json"));
  CHECK(r.exit_code == 0);
  CHECK(r.report["command"] == "validate");
  CHECK(r.report["result"]["valid"] == true);
  CHECK(r.report["verdict"] == "valid");
  CHECK(r.report["errors"].empty());
  CHECK_FALSE(r.report["version"].get<std::string>().empty());
}

TEST_CASE("words: rank-2 count at max_len 3") {
  const auto r = run_cli("words --config " + config("four_disk.json") + " --max-len 3");
  CHECK(r.exit_code == 0);
  CHECK(r.report["result"]["count"] == 53);
  CHECK(r.report["result"]["rank"] == 2);
  CHECK(r.report["config"]["max_len"] == 3);  // flag overrode the config value
  CHECK(r.report["result"]["within_capacity"] == true);
}

TEST_CASE("green: frozen cyclic value, shells, verdict") {
  const auto r = run_cli("green --config " + config("cyclic.json"));
  CHECK(r.exit_code == 0);
  const double total = r.report["result"]["total"].get<double>();
  CHECK(std::abs(total - 1.3079739638131698) <= 1e-10);
  CHECK(r.report["shells"].size() == 41);  // lengths 0..40
  CHECK(r.report["shells"][0]["n"] == 0);
  CHECK(r.report["verdict"] == "converging");
}

TEST_CASE("green: echoed config reruns bit-identically") {
  const auto first = run_cli("green --config " + config("cyclic.json"));
  REQUIRE(first.exit_code == 0);

  const std::string tmp = "roundtrip_config.json";
  {
    std::ofstream out(tmp);
    out << first.report["config"].dump(2);
  }
  const auto second = run_cli("green --config " + tmp);
  std::remove(tmp.c_str());
  CHECK(second.exit_code == 0);
  CHECK(second.report["result"]["total"].get<double>() ==
        first.report["result"]["total"].get<double>());
  CHECK(second.report["shells"] == first.report["shells"]);
  CHECK(second.report["config"] == first.report["config"]);
}

TEST_CASE("missing config file exits 1 with an error entry") {
  const auto r = run_cli("green --config no_such_file.json");
  CHECK(r.exit_code == 1);
  CHECK(r.report["errors"].size() == 1);
}

TEST_CASE("overlapping disks exit 2 and the validate report says why") {
  const std::string tmp = "overlap_config.json";
  {
    std::ofstream out(tmp);
    out << R"({"group": {"disks": [
      {"center": [0.0, 0.0], "radius": 1.0},
      {"center": [0.5, 0.0], "radius": 1.0}
    ]}})";
  }
  const auto validate = run_cli("validate --config " + tmp);
  CHECK(validate.exit_code == 2);
  CHECK(validate.report["result"]["valid"] == false);
  CHECK(validate.report["verdict"] == "invalid");

  const auto green = run_cli("green --config " + tmp);
  std::remove(tmp.c_str());
  CHECK(green.exit_code == 2);
  CHECK_FALSE(green.report["errors"].empty());
}

TEST_CASE("symmetric four-disk period matrix exits 3 on the exact singularity") {
  const auto r = run_cli("xmatrix --config " + config("four_disk.json"));
  CHECK(r.exit_code == 3);
  CHECK_FALSE(r.report["errors"].empty());
}

TEST_CASE("limits --csv writes the point-cloud table") {
  const std::string tmp = "cloud.csv";
  const auto r = run_cli("limits --config " + config("four_disk.json") + " --csv " + tmp);
  CHECK(r.exit_code == 0);
  const std::size_t rows = r.report["result"]["rows_written"].get<std::size_t>();
  CHECK(rows > 0);

  std::ifstream in(tmp);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "re,im,radius,word_length");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  in.close();
  std::remove(tmp.c_str());
  CHECK(lines == rows);
}

TEST_CASE("SCHOTTKY_CAPACITY caps the word budget") {
  const auto r = run_cli("green --config " + config("cyclic.json") + " --max-len 40");
  REQUIRE(r.exit_code == 0);  // 81 words fit the default budget

  int code = -1;
  {
    const std::string cmd = "SCHOTTKY_CAPACITY=50 " + std::string(SCHOTTKY_CLI_PATH) +
                            " green --config " + config("cyclic.json") + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    code = WEXITSTATUS(pclose(pipe));
    const json report = json::parse(out);
    CHECK_FALSE(report["errors"].empty());
    CHECK(report["config"]["capacity"] == 50);
  }
  CHECK(code == 3);
}

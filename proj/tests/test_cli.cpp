// Exercises the installed CLI surface end to end through a shell.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kWorkDir = fs::path("cli_test_tmp");

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CommandResult run_cli(const std::string& args) {
  const fs::path out_file = kWorkDir / "stdout.txt";
  const fs::path err_file = kWorkDir / "stderr.txt";
  const std::string cmd = std::string(SPLITSIM_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) ++count;
  return count;
}

struct WorkDirSetup {
  WorkDirSetup() {
    fs::remove_all(kWorkDir);
    fs::create_directories(kWorkDir);
  }
};
const WorkDirSetup kSetup{};

}  // namespace

TEST_CASE("generate writes metadata plus one line per sample") {
  const fs::path trace = kWorkDir / "t.jsonl";
  const auto result =
      run_cli("generate --sigma 0 --samples 1000 --seed 1 --out " + trace.string());
  REQUIRE(result.exit_code == 0);
  CHECK(line_count(trace) == 1001);
  CHECK(result.out.find("wrote") != std::string::npos);
}

TEST_CASE("generate is deterministic across invocations") {
  const fs::path a = kWorkDir / "a.jsonl";
  const fs::path b = kWorkDir / "b.jsonl";
  REQUIRE(run_cli("generate --sigma 1.5 --samples 200 --seed 9 --out " + a.string())
              .exit_code == 0);
  REQUIRE(run_cli("generate --sigma 1.5 --samples 200 --seed 9 --out " + b.string())
              .exit_code == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("generate can emit a drift trace") {
  const fs::path trace = kWorkDir / "drift.jsonl";
  const auto result = run_cli(
      "generate --sigma 0 --sigma-b 3 --samples 100 --switch-at 100 --seed 1 --out " +
      trace.string());
  REQUIRE(result.exit_code == 0);
  CHECK(line_count(trace) == 201);
  CHECK(result.out.find("switch_index") != std::string::npos);
}

TEST_CASE("run on the final-layer policy is its own baseline") {
  const fs::path trace = kWorkDir / "t.jsonl";
  const fs::path out = kWorkDir / "final_run";
  const auto result = run_cli("run --policy final --trace " + trace.string() +
                              " --seeds 2 --out " + out.string());
  REQUIRE(result.exit_code == 0);

  const std::string summary = slurp(out / "summary.csv");
  std::istringstream lines(summary);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream fieldstream(line);
    std::string field;
    while (std::getline(fieldstream, field, ',')) fields.push_back(field);
    CHECK(fields[4] == "0");  // accuracy delta
    CHECK(fields[6] == "0");  // cost delta
  }
  CHECK(fs::exists(out / "aggregate.csv"));
  CHECK(fs::exists(out / "rounds_final_seed1.csv"));
}

TEST_CASE("oracle marks the best arm") {
  const fs::path trace = kWorkDir / "t.jsonl";
  const fs::path out = kWorkDir / "oracle.csv";
  const auto result =
      run_cli("oracle --trace " + trace.string() + " --out " + out.string());
  REQUIRE(result.exit_code == 0);
  CHECK(result.out.find('*') != std::string::npos);
  const std::string csv = slurp(out);
  CHECK(csv.find("arm,gamma,mean_reward,gap,is_best") == 0);
  CHECK(csv.find(",1\n") != std::string::npos);  // some arm is the best
}

TEST_CASE("a degenerate sweep matches the equivalent run") {
  const fs::path sweep_out = kWorkDir / "sweep.csv";
  const fs::path run_out = kWorkDir / "sweep_run";
  const std::string shared =
      "--samples 500 --seeds 3 --alpha 0.6 --sigma 1 --offload 0.6";

  REQUIRE(run_cli("sweep --sigmas 1 --offloads 0.6 --policies isplitee " + shared +
                  " --out " + sweep_out.string())
              .exit_code == 0);
  REQUIRE(run_cli("run --policy isplitee " + shared + " --out " + run_out.string())
              .exit_code == 0);

  // the sweep row is "sigma,offload," + the run's aggregate row
  std::istringstream sweep_lines(slurp(sweep_out));
  std::string header, sweep_row;
  std::getline(sweep_lines, header);
  std::getline(sweep_lines, sweep_row);

  std::istringstream agg_lines(slurp(run_out / "aggregate.csv"));
  std::string agg_header, agg_row;
  std::getline(agg_lines, agg_header);
  std::getline(agg_lines, agg_row);

  CHECK(sweep_row == "1,0.6," + agg_row);
}

TEST_CASE("sweeping the offload cost moves cost, not accuracy") {
  const fs::path out = kWorkDir / "osweep.csv";
  REQUIRE(run_cli("sweep --sigmas 1 --offloads 0.2,0.4,0.6,0.8,1.0 "
                  "--policies isplitee --samples 4000 --seeds 3 --out " +
                  out.string())
              .exit_code == 0);

  std::istringstream lines(slurp(out));
  std::string line;
  std::getline(lines, line);  // header
  std::vector<double> costs, accuracies;
  while (std::getline(lines, line)) {
    std::vector<std::string> fields;
    std::istringstream fieldstream(line);
    std::string field;
    while (std::getline(fieldstream, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() >= 9);
    accuracies.push_back(std::stod(fields[5]));  // accuracy_mean
    costs.push_back(std::stod(fields[7]));       // cost_mean
  }
  REQUIRE(costs.size() == 5);
  for (std::size_t i = 1; i < costs.size(); ++i) CHECK(costs[i] >= costs[i - 1]);
  const auto [lo, hi] = std::minmax_element(accuracies.begin(), accuracies.end());
  CHECK(*hi - *lo < 0.02);  // within two points across the offload grid
}

TEST_CASE("errors exit nonzero with a machine-readable line") {
  const auto missing = run_cli("run --policy isplitee --trace does_not_exist.jsonl");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("error:") == 0);

  const auto bad_policy = run_cli("run --policy adaee --samples 50");
  CHECK(bad_policy.exit_code == 1);
  CHECK(bad_policy.err.find("error:") == 0);

  const auto no_seeds = run_cli("run --samples 50 --seeds 0");
  CHECK(no_seeds.exit_code == 1);
  CHECK(no_seeds.err.find("error:") == 0);

  const auto bad_flag = run_cli("generate --samples");
  CHECK(bad_flag.exit_code != 0);
}

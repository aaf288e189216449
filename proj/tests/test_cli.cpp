#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "badgeforge/cli.hpp"

using namespace badgeforge;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("badgeforge_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("solve from contribution thresholds") {
  const auto dir = temp_dir("solve");
  const auto r = run_cli({"solve", "--out", dir.string(),
                          "--mechanism.variant=absolute",
                          "--mechanism.thetas=[0.25, 0.4375]"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("p,2") != std::string::npos);
  CHECK(r.out.find("contribution,0.171875") != std::string::npos);
  CHECK(r.out.find("1,0.5") != std::string::npos);
  CHECK(r.out.find("2,0.25") != std::string::npos);
  CHECK(fs::exists(dir / "solve.csv"));
}

TEST_CASE("solve: overpriced badge means no participation") {
  const auto dir = temp_dir("solve0");
  const auto r = run_cli({"solve", "--out", dir.string(),
                          "--mechanism.variant=absolute", "--mechanism.thetas=[5]"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("p,0") != std::string::npos);
  CHECK(r.out.find("contribution,0") != std::string::npos);
}

TEST_CASE("solve from quantile thresholds echoes the implementing thetas") {
  const auto dir = temp_dir("solvek");
  const auto r = run_cli({"solve", "--out", dir.string(),
                          "--mechanism.variant=absolute", "--mechanism.kappas=[0.5]"});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("1,0.5,0.25") != std::string::npos);
}

TEST_CASE("config errors exit with code 2") {
  CHECK(run_cli({"solve", "--mechanism.variant=absolute"}).code == cli::kExitConfig);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitConfig);
  CHECK(run_cli({"solve", "--config", "/nonexistent.json"}).code == cli::kExitConfig);
  CHECK(run_cli({"reproduce", "unknown-id"}).code == cli::kExitConfig);
  CHECK(run_cli({"simulate", "--n=large"}).code == cli::kExitConfig);
}

TEST_CASE("model violations exit with code 3") {
  // power(0.5) is irregular, so optimal_contribution refuses
  const auto r = run_cli({"compare", "--out", temp_dir("irr").string(),
                          "--distribution.kind=power", "--distribution.alpha=0.5"});
  CHECK(r.code == cli::kExitModel);
}

TEST_CASE("compare emits the ratio table") {
  const auto dir = temp_dir("compare");
  const auto r = run_cli({"compare", "--out", dir.string()});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.find("mechanism,contribution,ratio,bound,pass") != std::string::npos);
  CHECK(r.out.find("median,0.125,1.6666666") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);

  const auto conv = run_cli({"compare", "--out", temp_dir("compare2").string(),
                             "--status.kind=convex-reciprocal", "--status.n_ref=30",
                             "--n=30"});
  CHECK(conv.code == cli::kExitOk);
  CHECK(conv.out.find("leaderboard") != std::string::npos);
  CHECK(conv.out.find("FAIL") == std::string::npos);
}

TEST_CASE("compare sweeps a declared parameter in parallel") {
  const auto dir = temp_dir("sweep");
  const auto config = dir / "sweep.json";
  {
    std::ofstream out(config);
    out << R"({"distribution": {"kind": "long-tail", "H": 10},
               "sweep": {"parameter": "distribution.H", "values": [10, 100, 1000]}})";
  }
  const auto r = run_cli({"compare", "--config", config.string(), "--out", dir.string(),
                          "--jobs", "3"});
  CHECK(r.code == cli::kExitOk);
  const std::string body = slurp(dir / "compare.csv");
  CHECK(body.find("distribution.H,mechanism,") == 0);
  CHECK(body.find("\n10,optimal") != std::string::npos);
  CHECK(body.find("\n1000,median") != std::string::npos);

  // serial run produces the same bytes
  const auto dir2 = temp_dir("sweep_serial");
  run_cli({"compare", "--config", config.string(), "--out", dir2.string()});
  CHECK(slurp(dir2 / "compare.csv") == body);

  // undeclared parameters are refused
  const auto bad = run_cli({"compare", "--sweep.parameter=nonsense.path",
                            "--sweep.values=[1,2]"});
  CHECK(bad.code == cli::kExitConfig);

  // from/to/steps form, log-spaced
  const auto dir3 = temp_dir("sweep_range");
  const auto r3 = run_cli({"compare", "--out", dir3.string(),
                           "--distribution.kind=long-tail", "--distribution.H=1",
                           "--sweep.parameter=distribution.H", "--sweep.from=10",
                           "--sweep.to=1000", "--sweep.steps=3", "--sweep.log=true"});
  CHECK(r3.code == cli::kExitOk);
  CHECK(slurp(dir3 / "compare.csv").find("\n100,optimal") != std::string::npos);
}

TEST_CASE("reproduce writes sweep CSV and plot script") {
  const auto dir = temp_dir("repro");
  const auto r = run_cli({"reproduce", "median-4", "--out", dir.string(), "--jobs", "4"});
  CHECK(r.code == cli::kExitOk);
  REQUIRE(fs::exists(dir / "median-4.csv"));
  REQUIRE(fs::exists(dir / "median-4.gp"));
  const std::string body = slurp(dir / "median-4.csv");
  CHECK(body.find("H,optimal,median,ratio") == 0);
  CHECK(body.back() == '\n');
  // parallel run must produce the same bytes as a serial one
  const auto dir2 = temp_dir("repro_serial");
  run_cli({"reproduce", "median-4", "--out", dir2.string()});
  CHECK(slurp(dir2 / "median-4.csv") == body);
}

TEST_CASE("empirical samples flow through the config") {
  const auto dir = temp_dir("emp");
  const auto samples = dir / "abilities.txt";
  {
    std::ofstream out(samples);
    for (int i = 0; i <= 100; ++i) out << i / 100.0 << "\n";
  }
  const auto r = run_cli({"solve", "--out", dir.string(),
                          "--distribution.kind=empirical",
                          "--distribution.path=" + samples.string(),
                          "--mechanism.variant=absolute", "--mechanism.kappas=[0.5]"});
  CHECK(r.code == cli::kExitOk);
  // v(1/2) = 1/2 for the uniform sample grid, so theta = 1/4
  CHECK(r.out.find("1,0.5,0.25") != std::string::npos);
}

TEST_CASE("--seed overrides the seed list") {
  const auto dir1 = temp_dir("seedflag1");
  const auto dir2 = temp_dir("seedflag2");
  const std::vector<std::string> common{
      "simulate", "--n=100", "--trials=40", "--regret_trials=60",
      "--expost_trials=40", "--mechanism.variant=construction",
      "--mechanism.name=median"};
  auto args1 = common;
  args1.insert(args1.end(), {"--seed", "9", "--out", dir1.string()});
  auto args2 = common;
  args2.insert(args2.end(), {"--seeds=[9]", "--out", dir2.string()});
  run_cli(args1);
  run_cli(args2);
  CHECK(slurp(dir1 / "simulate.csv") == slurp(dir2 / "simulate.csv"));
}

TEST_CASE("reproduce convex-log: contribution grows like ln 2 per doubling") {
  const auto dir = temp_dir("convexlog");
  const auto r = run_cli({"reproduce", "convex-log", "--out", dir.string(), "--jobs=4"});
  CHECK(r.code == cli::kExitOk);
  std::istringstream csv(slurp(dir / "convex-log.csv"));
  std::string line;
  std::getline(csv, line);  // header
  std::vector<double> opt;
  while (std::getline(csv, line)) {
    const auto last = line.rfind(',');
    opt.push_back(std::stod(line.substr(last + 1)));
  }
  REQUIRE(opt.size() == 7);  // n = 2^6 .. 2^12
  const double slope = (opt.back() - opt.front()) / 6.0;
  CHECK(std::abs(slope - std::log(2.0)) <= 0.15 * std::log(2.0));
}

TEST_CASE("tiebreak table") {
  const auto dir = temp_dir("tiebreak");
  const auto r = run_cli({"tiebreak", "--out", dir.string()});
  CHECK(r.code == cli::kExitOk);
  // every beta row carries the median root 0.5
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);  // header
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.find("0.5") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 11);
  CHECK(r.out.find("full-leaderboard") != std::string::npos);
  CHECK(r.out.find("0.375") != std::string::npos);  // beta = 0 cutoff

  CHECK(run_cli({"tiebreak", "--status.kind=convex-reciprocal", "--status.n_ref=5"}).code ==
        cli::kExitConfig);
}

TEST_CASE("simulate: deterministic bytes and sane estimates") {
  const auto dir1 = temp_dir("sim1");
  const auto dir2 = temp_dir("sim2");
  const std::vector<std::string> base{
      "simulate",       "--n=300",
      "--trials=120",   "--regret_trials=200",
      "--expost_trials=120", "--mechanism.variant=construction",
      "--mechanism.name=median", "--seeds=[3,4]"};
  auto with_out = [&](const std::string& d) {
    auto args = base;
    args.push_back("--out");
    args.push_back(d);
    return args;
  };
  const auto r1 = run_cli(with_out(dir1.string()));
  CHECK(r1.code == cli::kExitOk);
  const auto r2 = run_cli(with_out(dir2.string()));
  CHECK(slurp(dir1 / "simulate.csv") == slurp(dir2 / "simulate.csv"));
  CHECK(r1.out.find("aggregate") != std::string::npos);
  CHECK(r1.out.find("FAIL") == std::string::npos);
}

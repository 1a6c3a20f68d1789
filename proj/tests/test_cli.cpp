#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "recontree/errors.hpp"
#include "recontree/runner.hpp"
#include <sys/wait.h>

using namespace recontree;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(RECONTREE_CLI_PATH) + " " + args;
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("scan output is byte-identical across thread counts") {
  RunConfig config;
  config.k = 3;
  config.deltas = {2};
  config.depths = {0, 1, 2};
  config.trials = 5000;
  config.seed = 99;

  config.threads = 1;
  auto rows1 = run_scan(config);
  std::ostringstream csv1;
  write_scan_csv(csv1, config, rows1);

  config.threads = 4;
  auto rows4 = run_scan(config);
  std::ostringstream csv4;
  write_scan_csv(csv4, config, rows4);

  CHECK(csv1.str() == csv4.str());
  CHECK(scan_to_json(config, rows1).dump() == scan_to_json(config, rows4).dump());
}

TEST_CASE("csv schema is stable") {
  RunConfig config;
  config.k = 3;
  config.deltas = {2};
  config.depths = {1};
  config.trials = 1000;
  std::ostringstream csv;
  write_scan_csv(csv, config, run_scan(config));
  std::string text = csv.str();
  CHECK(text.find("# recontree ") == 0);
  CHECK(text.find("k,delta,n,trials,x_n,x_n_se,z_n,z_n_se,p_n,p_n_se,"
                   "tv,tv_se,ks_flag,lower_bound,upper_bound\n") !=
        std::string::npos);
}

TEST_CASE("empty grid gives a header-only table") {
  RunConfig config;
  config.deltas = {};
  config.depths = {1};
  auto rows = run_scan(config);
  CHECK(rows.empty());
  std::ostringstream csv;
  write_scan_csv(csv, config, rows);
  CHECK(csv.str().find("k,delta,n") != std::string::npos);
}

TEST_CASE("k=2 rows leave the bound columns empty") {
  RunConfig config;
  config.k = 2;
  config.deltas = {1};
  config.depths = {1};
  config.trials = 500;
  auto rows = run_scan(config);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].have_bounds);
  auto j = scan_to_json(config, rows);
  CHECK(j["rows"][0]["lower_bound"].is_null());
}

TEST_CASE("metadata embeds version and seed") {
  auto j = metadata_json(777);
  CHECK(j["version"] == kVersion);
  CHECK(j["seed"] == 777);
}

TEST_CASE("run_verify desk bundle passes") {
  VerifyConfig config;
  config.trials = 20000;
  config.seed = 4;
  auto summary = run_verify(config);
  CHECK(summary.all_pass);
  bool saw_na = false;
  for (const auto& c : summary.checks) {
    INFO(c.name);
    if (!c.applicable) {
      saw_na = true;
      continue;
    }
    CHECK(c.pass);
  }
  CHECK(saw_na);  // z-bound gates are honest about the desk-scale regime
  auto j = verify_to_json(config, summary);
  CHECK(j["all_pass"] == true);
}

TEST_CASE("cli posterior reads a leaf config and prints the belief") {
  const char* in_path = "cli_posterior_in.json";
  {
    std::ofstream os(in_path);
    os << R"({"root":1,"depth":1,"offspring":[2],"leaves":[2,3]})";
  }
  int rc = run_cli("posterior --k 3 --in cli_posterior_in.json "
                   "--out cli_posterior_out.json");
  CHECK(rc == 0);
  auto j = json::parse(slurp("cli_posterior_out.json"));
  CHECK(j[0].get<double>() == doctest::Approx(1.0));
  CHECK(j[1].get<double>() == doctest::Approx(0.0));
  std::remove(in_path);
  std::remove("cli_posterior_out.json");
}

TEST_CASE("cli exit codes") {
  CHECK(run_cli("bounds --k 5 --delta 3 --out cli_bounds.json") == 0);
  std::remove("cli_bounds.json");
  CHECK(run_cli("nonsense-subcommand 2>/dev/null") == 2);
  CHECK(run_cli("simulate --k 1 2>/dev/null") == 2);               // bad k
  CHECK(run_cli("simulate --trials 0 --k 3 2>/dev/null") == 2);    // bad trials
  CHECK(run_cli("scan --out /nonexistent-dir/x.csv --trials 10 2>/dev/null") ==
        3);
  CHECK(run_cli("coupling-test --trials 2000 --out cli_ct.json") == 0);
  std::remove("cli_ct.json");
}

TEST_CASE("cli fixpoint emits a csv trace") {
  int rc = run_cli("fixpoint --k 100 --beta-star 0.2 --delta 500 --map g "
                   "--out cli_fp.csv");
  CHECK(rc == 0);
  auto text = slurp("cli_fp.csv");
  CHECK(text.find("step,value") != std::string::npos);
  CHECK(text.find("# map=g") != std::string::npos);
  std::remove("cli_fp.csv");
}

TEST_CASE("leaf config json round trip") {
  auto j = json::parse(
      R"({"root":2,"depth":2,"offspring":[2,2,2],"leaves":[2,3,3,2]})");
  auto cfg = leaf_config_from_json(j);
  CHECK(cfg.root_colour == 1);
  CHECK(cfg.leaf_colours == std::vector<Colour>{1, 2, 2, 1});
  CHECK(leaf_config_to_json(cfg).dump() == j.dump());
  CHECK_THROWS(leaf_config_from_json(
      json::parse(R"({"root":0,"depth":1,"offspring":[1],"leaves":[1]})")));
}

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scenerylab/runconfig.hpp"

namespace fs = std::filesystem;
namespace run = scenerylab::run;

namespace {

const char* kCli = SCENERYLAB_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("scenerylab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(kCli) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

constexpr const char* kSmallConfig =
    "# minimal smoke configuration\n"
    "experiment = naive_mc\n"
    "d = 2\n"
    "walk = lazy\n"
    "scenery = gaussian\n"
    "scenery_param = 1.0\n"
    "n = 256\n"
    "b = 0\n"
    "replicas = 10000\n"
    "seed = 1\n";

}  // namespace

TEST(Config, ParseAndValidate) {
  run::RunConfig cfg = run::parse_config(kSmallConfig);
  EXPECT_EQ(cfg.experiment, "naive_mc");
  EXPECT_EQ(cfg.d, 2);
  EXPECT_EQ(cfg.n_grid.size(), 1u);
  EXPECT_EQ(cfg.n_grid[0], 256);
  EXPECT_EQ(cfg.replicas, 10000);

  // unknown keys are hard errors
  EXPECT_THROW(run::parse_config("experiment = naive_mc\nn = 4\nbogus = 1\n"),
               std::invalid_argument);
  EXPECT_THROW(run::parse_config("experiment = naive_mc\n"),
               std::invalid_argument);  // missing n
  EXPECT_THROW(run::parse_config("experiment = nope\nn = 4\n"),
               std::invalid_argument);
  EXPECT_THROW(run::parse_config("experiment = naive_mc\nn = 4\nn = 8\n"),
               std::invalid_argument);  // duplicate
  // grids parse
  auto grid = run::parse_config(
      "experiment = conditional_mc\nn = 1024, 2048\nb_pow = 0.6\n");
  EXPECT_EQ(grid.n_grid.size(), 2u);
  ASSERT_TRUE(grid.b_pow.has_value());
}

TEST(Config, HashIsStable) {
  EXPECT_EQ(run::config_hash_hex("abc"), run::config_hash_hex("abc"));
  EXPECT_NE(run::config_hash_hex("abc"), run::config_hash_hex("abd"));
}

TEST(RunExperiment, MinimalNaiveConfigEstimatesHalf) {
  auto out = run::run_experiment(kSmallConfig, std::nullopt, std::nullopt);
  EXPECT_EQ(out.exit_code, 0);
  // header + one row
  std::istringstream csv(out.results_csv);
  std::string header, row, extra;
  ASSERT_TRUE(std::getline(csv, header));
  ASSERT_TRUE(std::getline(csv, row));
  EXPECT_FALSE(std::getline(csv, extra));
  EXPECT_EQ(header,
            "experiment,estimator,d,law,scenery,n,b,p_hat,log_p_hat,stderr,"
            "replicas,seed,flags");
  // p_hat ~ 0.5
  std::vector<std::string> cols;
  std::stringstream ss(row);
  std::string tok;
  while (std::getline(ss, tok, ',')) cols.push_back(tok);
  ASSERT_GE(cols.size(), 12u);
  double p = std::stod(cols[7]);
  EXPECT_NEAR(p, 0.5, 0.02);
  EXPECT_EQ(cols[3], "lazy2");
}

TEST(RunExperiment, ByteIdenticalRerunsAndWorkerInvariance) {
  auto a = run::run_experiment(kSmallConfig, std::nullopt, 1);
  auto b = run::run_experiment(kSmallConfig, std::nullopt, 4);
  auto c = run::run_experiment(kSmallConfig, std::nullopt, std::nullopt);
  EXPECT_EQ(a.results_csv, b.results_csv);
  EXPECT_EQ(a.results_csv, c.results_csv);
}

TEST(RunExperiment, SeedOverridePrecedence) {
  auto base = run::run_experiment(kSmallConfig, std::nullopt, std::nullopt);
  auto override9 = run::run_experiment(kSmallConfig, 9, std::nullopt);
  EXPECT_NE(base.results_csv, override9.results_csv);

  // the environment variable overrides the config seed
  setenv("SCENERYLAB_SEED", "9", 1);
  auto via_env = run::run_experiment(kSmallConfig, std::nullopt, std::nullopt);
  unsetenv("SCENERYLAB_SEED");
  EXPECT_EQ(via_env.results_csv, override9.results_csv);
  EXPECT_NE(via_env.manifest_json.find("\"seed_source\": \"env\""),
            std::string::npos);
}

TEST(RunExperiment, UnreliableInnerEstimatesFlagAndExitCode) {
  // laplace scenery with a target far outside the admissible tilt domain:
  // every inner estimate fails, the row is flagged, exit code is 2
  std::string cfg =
      "experiment = conditional_mc\nd = 2\nwalk = lazy\nscenery = laplace\n"
      "scenery_param = 1.0\nn = 64\nb = 2000\nreplicas = 100\n"
      "inner_replicas = 100\nseed = 3\n";
  auto out = run::run_experiment(cfg, std::nullopt, std::nullopt);
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_NE(out.results_csv.find("inner-failures=100;unreliable"),
            std::string::npos);

  // bounded scenery beyond its support maximum is not a failure: the
  // conditional tail is exactly zero and the estimator reports it
  std::string zero_cfg =
      "experiment = conditional_mc\nd = 2\nwalk = lazy\n"
      "scenery = rademacher\nn = 16\nb = 17\nreplicas = 100\n"
      "inner_replicas = 100\nseed = 3\n";
  auto zero = run::run_experiment(zero_cfg, std::nullopt, std::nullopt);
  EXPECT_EQ(zero.exit_code, 0);
  EXPECT_NE(zero.results_csv.find(",0,-inf,"), std::string::npos);
}

TEST(RunExperiment, ConcentrationAndMaxtailDetailTables) {
  std::string conc =
      "experiment = ell2_concentration\nd = 3\nwalk = lazy\nn = 256\n"
      "replicas = 2000\nseed = 4\nx_grid = 0, 16, 32, 64\n";
  auto out = run::run_experiment(conc, std::nullopt, std::nullopt);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_NE(out.detail_csv.find("x,p_two,p_up,p_down"), std::string::npos);
  // three rows (two one-sided + the sum) per grid point, plus header
  std::size_t rows = std::count(out.results_csv.begin(), out.results_csv.end(), '\n');
  EXPECT_EQ(rows, 1u + 3u * 4u);

  std::string maxt =
      "experiment = max_local_time_tail\nd = 3\nwalk = lazy\nn = 512\n"
      "replicas = 3000\nseed = 4\nk_grid = 1,2,3\n";
  auto mo = run::run_experiment(maxt, std::nullopt, std::nullopt);
  EXPECT_NE(mo.detail_csv.find("k,p_hat,stderr,geometric_bound"),
            std::string::npos);
  EXPECT_NE(mo.results_csv.find("hitting-estimate"), std::string::npos);
}

TEST(CliBinary, RunProducesDeterministicArtifacts) {
  fs::path dir1 = temp_dir("run1"), dir2 = temp_dir("run2");
  fs::path cfg = dir1 / "cfg.txt";
  std::ofstream(cfg) << kSmallConfig;

  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --out " + dir1.string() +
                    " --workers 1"),
            0);
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --out " + dir2.string() +
                    " --workers 2"),
            0);
  EXPECT_EQ(slurp(dir1 / "results.csv"), slurp(dir2 / "results.csv"));
  EXPECT_FALSE(slurp(dir1 / "manifest.json").empty());
  fs::remove_all(dir1);
  fs::remove_all(dir2);
}

TEST(CliBinary, SubcommandsSmoke) {
  EXPECT_EQ(run_cli("rates eval --tag T2 --n 1000000 --b 10000 --sigma2 1 "
                    "--g0 1.5164"),
            0);
  EXPECT_EQ(run_cli("rates eval --tag T3c --a 0.5 --sigma2 1 --det-gamma "
                    "0.0625 --kappa 0.8"),
            0);
  EXPECT_EQ(run_cli("rates table --tag T2 --n 65536 --lo 0.55 --hi 0.62 "
                    "--step 0.01"),
            0);
  EXPECT_EQ(run_cli("oracle --what walks --walk simple --d 2 --n 4"), 0);
  EXPECT_EQ(run_cli("oracle --what twowalk --walk lazy --d 2 --n 2"), 0);
  EXPECT_EQ(run_cli("green --walk lazy --d 3 --horizon 512 --g0-tol 0.001 "
                    "--sumg2-n 64"),
            0);
  EXPECT_EQ(run_cli("rates eval --tag bogus"), 1);
  EXPECT_EQ(run_cli("run --config /nonexistent.cfg"), 1);
}

TEST(CliBinary, GreenCacheHitIsBitIdentical) {
  fs::path dir = temp_dir("cache");
  fs::path cache = dir / "table.bin";
  std::string base = "green --walk lazy --d 2 --horizon 256 --cache " +
                     cache.string();
  ASSERT_EQ(run_cli(base), 0);
  std::string first = slurp(cache);
  ASSERT_EQ(run_cli(base), 0);  // second run hits the cache
  EXPECT_EQ(slurp(cache), first);
  fs::remove_all(dir);
}

TEST(CliBinary, FitSubcommandRoundTrip) {
  fs::path dir = temp_dir("fit");
  fs::path cfg = dir / "cfg.txt";
  std::ofstream(cfg) << "experiment = conditional_mc\nd = 3\nwalk = lazy\n"
                        "scenery = gaussian\nscenery_param = 0.3\n"
                        "n = 1024, 2048, 4096\nb_pow = 0.6\n"
                        "replicas = 400\nseed = 2\n";
  ASSERT_EQ(run_cli("run --config " + cfg.string() + " --out " + dir.string()),
            0);
  EXPECT_EQ(run_cli("fit --csv " + (dir / "results.csv").string() +
                    " --model T2"),
            0);
  fs::remove_all(dir);
}

TEST(CliBinary, SelftestQuick) {
  EXPECT_EQ(run_cli("selftest --quick"), 0);
}

// Experiment configuration (flat key=value files), the pinned results.csv
// schema, the JSON run manifest, and the experiment driver shared by the
// command-line tool and the tests.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scenerylab::run {

struct RunConfig {
  std::string experiment;  // naive_mc | conditional_mc | ell2_concentration |
                           // max_local_time_tail
  int d = 3;
  std::string walk = "lazy";
  std::string scenery = "gaussian";
  double scenery_param = 1.0;
  std::vector<std::int64_t> n_grid;
  std::vector<double> b_values;          // explicit targets, or
  std::optional<double> b_pow;           // b = n^pow
  std::int64_t replicas = 10000;
  std::int64_t inner_replicas = 1000;
  std::uint64_t seed = 1;
  int workers = 0;                       // 0 = all cores
  std::optional<double> kappa;           // d=2 rate evaluations
  std::vector<double> x_grid;            // concentration; empty = auto
  std::vector<std::int64_t> k_grid;      // maxtail; empty = 1..10
};

// Parse the key=value text ('#' comments, blank lines ok). Unknown keys are
// hard errors.
RunConfig parse_config(const std::string& text);

std::string config_hash_hex(const std::string& text);

struct CsvRow {
  std::string experiment;
  std::string estimator;
  int d = 0;
  std::string law;
  std::string scenery;
  std::int64_t n = 0;
  double b = 0.0;
  double p_hat = 0.0;
  double log_p_hat = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0;
  std::string flags;
};

// Pinned schema: exact column order, '\n' endings, %.17g floats.
std::string csv_header();
std::string format_csv_row(const CsvRow& row);
std::string format_g17(double v);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 flagged-unreliable
  std::string results_csv;
  std::string detail_csv;  // experiment-specific extra table (may be empty)
  std::string manifest_json;
};

// Execute the configured experiment. Output bytes are a pure function of
// (config text, seed override); worker count only changes the wall time.
RunOutcome run_experiment(const std::string& config_text,
                          std::optional<std::uint64_t> seed_override,
                          std::optional<int> workers_override);

// run_experiment + write results.csv, detail.csv, manifest.json to out_dir.
int run_to_directory(const std::string& config_text, const std::string& out_dir,
                     std::optional<std::uint64_t> seed_override,
                     std::optional<int> workers_override);

}  // namespace scenerylab::run

// scenerylab: lattice random walk in random scenery laboratory.
//
// Subcommands: run, rates (eval|table), fit, oracle, green, concentration,
// maxtail, selftest. See docs/config.md for config keys and output formats.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "scenerylab/estimators.hpp"
#include "scenerylab/green.hpp"
#include "scenerylab/oracle.hpp"
#include "scenerylab/rates.hpp"
#include "scenerylab/runconfig.hpp"
#include "scenerylab/saddlepoint.hpp"
#include "scenerylab/selftest.hpp"
#include "scenerylab/walk_engine.hpp"

namespace {

using namespace scenerylab;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string g17(double v) { return run::format_g17(v); }

int cmd_run(const std::string& config_path, const std::string& out_dir,
            int workers, bool have_workers) {
  std::string text = read_file(config_path);
  std::optional<int> w;
  if (have_workers) w = workers;
  return run::run_to_directory(text, out_dir, std::nullopt, w);
}

int cmd_rates_eval(const std::string& tag, int d, double n, double b,
                   double sigma2, double g0, double det_gamma, double kappa,
                   double D, double beta, double K2, double a) {
  double v = 0.0;
  if (tag == "T1") v = rates::rate_T1(n, b, sigma2, g0);
  else if (tag == "T2") v = rates::rate_T2(n, b, sigma2, g0);
  else if (tag == "T3a") v = rates::rate_T3a(n, b, sigma2, det_gamma);
  else if (tag == "T3b") v = rates::rate_T3b(n, b, sigma2, det_gamma, kappa);
  else if (tag == "T3c") v = rates::rate_T3c(a, sigma2, det_gamma, kappa);
  else if (tag == "P-special") v = rates::rate_special(n, b, D, beta, K2);
  else if (tag == "BCR-p1") v = rates::rate_bcr(a, det_gamma, kappa);
  else if (tag == "classify") {
    auto r = rates::classify_regime(d, n, b);
    std::printf("%s: %s\n", rates::regime_name(r.tag), r.note.c_str());
    return 0;
  } else {
    std::fprintf(stderr, "unknown rate tag: %s\n", tag.c_str());
    return 1;
  }
  std::printf("%s\n", g17(v).c_str());
  return 0;
}

int cmd_rates_table(const std::string& tag, double sigma2, double g0,
                    double det_gamma, double kappa, double n,
                    double b_pow_lo, double b_pow_hi, double b_pow_step) {
  std::printf("tag,n,b,value\n");
  for (double e = b_pow_lo; e <= b_pow_hi + 1e-12; e += b_pow_step) {
    double b = std::pow(n, e);
    double v = 0.0;
    if (tag == "T2") v = rates::rate_T2(n, b, sigma2, g0);
    else if (tag == "T3a") v = rates::rate_T3a(n, b, sigma2, det_gamma);
    else if (tag == "T3b") v = rates::rate_T3b(n, b, sigma2, det_gamma, kappa);
    else {
      std::fprintf(stderr, "rates table supports T2, T3a, T3b\n");
      return 1;
    }
    std::printf("%s,%s,%s,%s\n", tag.c_str(), g17(n).c_str(), g17(b).c_str(),
                g17(v).c_str());
  }
  return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& model_name) {
  est::RateModel model;
  if (model_name == "T2") model = est::RateModel::T2;
  else if (model_name == "T3a") model = est::RateModel::T3a;
  else if (model_name == "T3b") model = est::RateModel::T3b;
  else {
    std::fprintf(stderr, "fit model must be T2, T3a or T3b\n");
    return 1;
  }
  std::ifstream in(csv_path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", csv_path.c_str());
    return 1;
  }
  std::string line;
  std::getline(in, line);  // header
  std::vector<est::RatePoint> points;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
    if (cols.size() < 12) continue;  // the trailing flags field may be empty
    est::RatePoint p;
    p.n = std::stod(cols[5]);
    p.b = std::stod(cols[6]);
    p.log_p = std::stod(cols[8]);
    points.push_back(p);
  }
  est::RateFit fit = est::empirical_rate(points, model);
  std::printf("points=%zu slope=%s intercept=%s r2=%s slope_stderr=%s\n",
              points.size(), g17(fit.slope).c_str(), g17(fit.intercept).c_str(),
              g17(fit.r2).c_str(), g17(fit.slope_stderr).c_str());
  return 0;
}

int cmd_oracle(const std::string& what, const std::string& walk, int d,
               std::int64_t n) {
  StepLaw law = StepLaw::by_name(walk, d);
  if (what == "walks") {
    auto ex = oracle::enumerate_walk_expectations(law, n);
    std::printf("E_ell2=%s (%s/%s)\n", g17(ex.e_ell2.to_double()).c_str(),
                ex.e_ell2.num.str().c_str(), ex.e_ell2.den.str().c_str());
    std::printf("E_ell3=%s (%s/%s)\n", g17(ex.e_ell3.to_double()).c_str(),
                ex.e_ell3.num.str().c_str(), ex.e_ell3.den.str().c_str());
    for (std::size_t k = 0; k < ex.p0.size(); ++k)
      std::printf("p0[%zu]=%s\n", k, g17(ex.p0[k].to_double()).c_str());
    std::printf("ell_inf distribution:\n");
    for (const auto& [count, prob] : ex.ell_inf_distribution)
      std::printf("  %u: %s\n", count, g17(prob.to_double()).c_str());
    return 0;
  }
  if (what == "twowalk") {
    auto m = oracle::exact_two_walk_moments(law, n);
    std::printf("E_A=%s E_A2=%s E_A3=%s E_Lambda=%s E_LambdaStar=%s\n",
                g17(m.e_a1.to_double()).c_str(), g17(m.e_a2.to_double()).c_str(),
                g17(m.e_a3.to_double()).c_str(),
                g17(m.e_lambda.to_double()).c_str(),
                g17(m.e_lambda_star.to_double()).c_str());
    return 0;
  }
  std::fprintf(stderr, "oracle: what must be walks|twowalk\n");
  return 1;
}

int cmd_green(const std::string& walk, int d, std::int64_t horizon,
              double g0_tol, std::int64_t k2_n, std::int64_t sumg2_n,
              const std::string& cache_path) {
  StepLaw law = StepLaw::by_name(walk, d);
  green::ReturnProbTable table;
  bool from_cache = false;
  if (!cache_path.empty()) {
    try {
      table = green::load_table(cache_path);
      from_cache = table.law_hash == law.hash() && table.horizon >= horizon;
    } catch (...) {
      from_cache = false;
    }
  }
  if (!from_cache) {
    table = green::return_probabilities(law, horizon);
    if (!cache_path.empty()) green::save_table(table, cache_path);
  }
  std::printf("law=%s horizon=%lld exact_horizon=%lld fit_c=%s cache=%s\n",
              law.name().c_str(), static_cast<long long>(table.horizon),
              static_cast<long long>(table.exact_horizon),
              g17(table.fit_c).c_str(), from_cache ? "hit" : "rebuilt");
  std::int64_t show = std::min<std::int64_t>(horizon, 8);
  for (std::int64_t k = 0; k <= show; ++k)
    std::printf("p0[%lld]=%s (%s)\n", static_cast<long long>(k),
                g17(table.p0[std::size_t(k)]).c_str(), table.method_tag(k));
  if (g0_tol > 0.0) {
    auto gz = green::green_zero(law, g0_tol);
    std::printf("G0=%s error_bound=%s\n", g17(gz.value).c_str(),
                g17(gz.error_bound).c_str());
  }
  if (k2_n > 0)
    std::printf("K2(%lld)=%s\n", static_cast<long long>(k2_n),
                g17(green::estimate_K2(table, k2_n)).c_str());
  if (sumg2_n > 0)
    std::printf("sum_Gn_squared(%lld)=%s\n", static_cast<long long>(sumg2_n),
                g17(green::sum_Gn_squared(table, sumg2_n)).c_str());
  std::printf("E_ell2(%lld)=%s\n", static_cast<long long>(horizon),
              g17(green::expected_ell2(table, horizon)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scenerylab: random walk in random scenery laboratory"};
  app.require_subcommand(1);

  // run
  std::string config_path, out_dir = "out";
  int workers = 0;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("--config", config_path, "config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  auto* workers_opt = run_cmd->add_option("--workers", workers, "worker threads");

  // rates eval / table
  auto* rates_cmd = app.add_subcommand("rates", "rate function evaluation");
  rates_cmd->require_subcommand(1);
  std::string tag = "T2";
  double rn = 1e6, rb = 1e4, sigma2 = 1.0, g0 = 1.5163860591519780;
  double det_gamma = 1.0, kappa = 1.0, D = 1.0, beta = 1.0, K2 = 1.0, a = 1.0;
  int rd = 3;
  auto* eval_cmd = rates_cmd->add_subcommand("eval", "evaluate one rate");
  eval_cmd->add_option("--tag", tag, "T1|T2|T3a|T3b|T3c|P-special|BCR-p1|classify")
      ->required();
  eval_cmd->add_option("--d", rd, "dimension (classify)");
  eval_cmd->add_option("--n", rn, "walk length");
  eval_cmd->add_option("--b", rb, "deviation target");
  eval_cmd->add_option("--sigma2", sigma2, "scenery variance");
  eval_cmd->add_option("--g0", g0, "Green function at zero");
  eval_cmd->add_option("--det-gamma", det_gamma, "det of the step covariance");
  eval_cmd->add_option("--kappa", kappa, "Gagliardo-Nirenberg constant");
  eval_cmd->add_option("--D", D, "scenery tail rate");
  eval_cmd->add_option("--beta", beta, "log b / log n limit");
  eval_cmd->add_option("--K2", K2, "local time constant");
  eval_cmd->add_option("--a", a, "T3c scale (or BCR lambda)");

  double lo = 0.55, hi = 0.65, step = 0.01;
  auto* table_cmd = rates_cmd->add_subcommand("table", "sweep b = n^e");
  table_cmd->add_option("--tag", tag)->required();
  table_cmd->add_option("--n", rn);
  table_cmd->add_option("--sigma2", sigma2);
  table_cmd->add_option("--g0", g0);
  table_cmd->add_option("--det-gamma", det_gamma);
  table_cmd->add_option("--kappa", kappa);
  table_cmd->add_option("--lo", lo, "lowest exponent");
  table_cmd->add_option("--hi", hi, "highest exponent");
  table_cmd->add_option("--step", step, "exponent step");

  // fit
  std::string csv_path, model_name = "T2";
  auto* fit_cmd = app.add_subcommand("fit", "fit a rate to results.csv");
  fit_cmd->add_option("--csv", csv_path, "results.csv from run")->required();
  fit_cmd->add_option("--model", model_name, "T2|T3a|T3b");

  // oracle
  std::string what = "walks", walk_name = "simple";
  int dim = 2;
  std::int64_t on = 4;
  auto* oracle_cmd = app.add_subcommand("oracle", "exact enumeration spot checks");
  oracle_cmd->add_option("--what", what, "walks|twowalk");
  oracle_cmd->add_option("--walk", walk_name, "simple|lazy");
  oracle_cmd->add_option("--d", dim, "dimension");
  oracle_cmd->add_option("--n", on, "steps");

  // green
  std::int64_t horizon = 1024, k2_n = 0, sumg2_n = 0;
  double g0_tol = 0.0;
  std::string cache_path;
  auto* green_cmd = app.add_subcommand("green", "return probability tables");
  green_cmd->add_option("--walk", walk_name, "simple|lazy");
  green_cmd->add_option("--d", dim, "dimension");
  green_cmd->add_option("--horizon", horizon, "table horizon");
  green_cmd->add_option("--g0-tol", g0_tol, "also compute G(0) to this tolerance");
  green_cmd->add_option("--k2-n", k2_n, "also estimate K2 at this n");
  green_cmd->add_option("--sumg2-n", sumg2_n, "also evaluate sum G_n^2");
  green_cmd->add_option("--cache", cache_path, "binary cache file");

  // concentration / maxtail: thin config wrappers
  auto* conc_cmd = app.add_subcommand("concentration",
                                      "self-intersection concentration table");
  conc_cmd->add_option("--config", config_path, "config file")->required();
  conc_cmd->add_option("--out", out_dir, "output directory");
  auto* conc_workers = conc_cmd->add_option("--workers", workers);

  auto* max_cmd = app.add_subcommand("maxtail", "maximal local time tail");
  max_cmd->add_option("--config", config_path, "config file")->required();
  max_cmd->add_option("--out", out_dir, "output directory");
  auto* max_workers = max_cmd->add_option("--workers", workers);

  // selftest
  bool quick = false;
  auto* self_cmd = app.add_subcommand("selftest", "run the invariant suite");
  self_cmd->add_flag("--quick", quick, "skip the slower checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd)
      return cmd_run(config_path, out_dir, workers, workers_opt->count() > 0);
    if (*eval_cmd)
      return cmd_rates_eval(tag, rd, rn, rb, sigma2, g0, det_gamma, kappa, D,
                            beta, K2, a);
    if (*table_cmd)
      return cmd_rates_table(tag, sigma2, g0, det_gamma, kappa, rn, lo, hi, step);
    if (*fit_cmd) return cmd_fit(csv_path, model_name);
    if (*oracle_cmd) return cmd_oracle(what, walk_name, dim, on);
    if (*green_cmd)
      return cmd_green(walk_name, dim, horizon, g0_tol, k2_n, sumg2_n,
                       cache_path);
    if (*conc_cmd)
      return cmd_run(config_path, out_dir, workers, conc_workers->count() > 0);
    if (*max_cmd)
      return cmd_run(config_path, out_dir, workers, max_workers->count() > 0);
    if (*self_cmd) return selftest::run_all(quick) ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

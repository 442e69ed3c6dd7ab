// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// anything fails. Tolerances are pinned in code next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "scenerylab/estimators.hpp"
#include "scenerylab/green.hpp"
#include "scenerylab/oracle.hpp"
#include "scenerylab/rates.hpp"
#include "scenerylab/runconfig.hpp"
#include "scenerylab/saddlepoint.hpp"
#include "scenerylab/scenery.hpp"
#include "scenerylab/walk_engine.hpp"

using namespace scenerylab;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      detail = msg;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Exact identity suite: 1,000 seeded paths per d in {2,3,4,5}, n <= 4096.
//    sum ell = n; ell2 = pairwise double sum; ell3 = triple sum (n <= 64);
//    dyadic identity at N <= 6 to 1e-9 relative. Runtime < 1 min.
Check criterion1() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  for (int d = 2; d <= 5 && c.ok; ++d) {
    StepLaw simple = StepLaw::simple(d);
    StepLaw lazy = StepLaw::lazy(d);
    auto table = green::return_probabilities(lazy, 64);
    double e_ell2_64 = green::expected_ell2(table, 64);
    for (int rep = 0; rep < 1000 && c.ok; ++rep) {
      std::int64_t n;
      if (rep < 600) n = (rep % 64) + 1;
      else if (rep < 750) n = 64;
      else if (rep < 900) n = 256;
      else if (rep < 980) n = 1024;
      else n = 4096;
      bool use_lazy = rep % 2 == 1;
      const StepLaw& law = use_lazy ? lazy : simple;
      rng::RandomStream s(std::uint64_t(1000 * d + rep), rng::Purpose::walk, 0);
      walk::WalkPath p = walk::sample_path(law, n, s);
      LocalTimeField f = walk::accumulate(p);

      // sum of counts
      std::int64_t total = 0;
      for (const auto& [key, count] : f.entries()) {
        (void)key;
        total += count;
      }
      c.require(total == n, "sum of local times != n at d=" + std::to_string(d));

      // pairwise double sum
      std::int64_t pairwise = 0;
      {
        SiteCountMap occ(std::size_t(n) + 1);
        for (const auto& pos : p.positions) occ.increment(pack_site(pos));
        for (const auto& pos : p.positions)
          pairwise += occ.count(pack_site(pos));
      }
      c.require(std::int64_t(f.ell2()) == pairwise,
                "ell2 != pairwise sum at d=" + std::to_string(d) +
                    " n=" + std::to_string(n));

      // triple sum for short paths
      if (n <= 64) {
        std::int64_t triple = 0;
        for (std::int64_t i = 0; i < n; ++i)
          for (std::int64_t j = 0; j < n; ++j)
            for (std::int64_t k = 0; k < n; ++k)
              triple += p.positions[std::size_t(i)] == p.positions[std::size_t(j)] &&
                        p.positions[std::size_t(j)] == p.positions[std::size_t(k)];
        c.require(std::int64_t(f.ell3()) == triple,
                  "ell3 != triple sum at d=" + std::to_string(d));
      }

      // dyadic identity at N = 6 on the lazy law paths
      if (n == 64 && use_lazy) {
        double lhs = f.ell2_d() - e_ell2_64;
        double rhs = 2.0 * walk::dyadic_terms(p, table.p0).total();
        double tol = 1e-9 * (f.ell2_d() + std::fabs(e_ell2_64));
        c.require(std::fabs(lhs - rhs) <= tol,
                  "dyadic identity off by " + fmt(lhs - rhs) + " at d=" +
                      std::to_string(d));
      }
    }
  }
  double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(dt < 60.0, "runtime " + fmt(dt) + " s exceeds 1 min");
  if (c.ok) c.detail = "4000 paths, " + fmt(dt) + " s";
  return c;
}

// ---------------------------------------------------------------------------
// 2. Oracle equivalence: return probabilities and E ell2 / E ell3 match
//    rational path enumeration to float conversion, d=2 n<=10 and d=3 n<=8.
Check criterion2() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  for (auto [d, nmax] : {std::pair{2, std::int64_t{10}}, {3, std::int64_t{8}}}) {
    for (auto maker : {&StepLaw::simple, &StepLaw::lazy}) {
      StepLaw law = maker(d);
      auto table = green::return_probabilities(law, nmax);
      auto exact = oracle::enumerate_walk_expectations(law, nmax);
      for (std::int64_t k = 0; k <= nmax; ++k) {
        double want = exact.p0[std::size_t(k)].to_double();
        c.require(std::fabs(table.p0[std::size_t(k)] - want) <=
                      1e-12 * (1.0 + want),
                  law.name() + ": p0[" + std::to_string(k) + "] mismatch");
      }
      double e2 = green::expected_ell2(table, nmax);
      double e3 = green::expected_ell3(table, nmax);
      c.require(std::fabs(e2 - exact.e_ell2.to_double()) <=
                    1e-12 * exact.e_ell2.to_double(),
                law.name() + ": E ell2 mismatch");
      c.require(std::fabs(e3 - exact.e_ell3.to_double()) <=
                    1e-12 * exact.e_ell3.to_double(),
                law.name() + ": E ell3 mismatch");
    }
  }
  double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(dt < 600.0, "runtime " + fmt(dt) + " s exceeds 10 min");
  if (c.ok) c.detail = "d=2 n<=10 and d=3 n<=8, both laws, " + fmt(dt) + " s";
  return c;
}

// ---------------------------------------------------------------------------
// 3. Expected self-intersection, d=3 lazy: E ell2(n)/n at n=2^17 within 2%
//    of 2 G(0) - 1 (G0 at tol 1e-4); Monte Carlo mean of ell2 at n=4096
//    (1e4 replicas) within 4 stderr of the exact expectation.
Check criterion3() {
  Check c;
  StepLaw law = StepLaw::lazy(3);
  auto gz = green::green_zero(law, 1e-4);
  c.require(gz.error_bound <= 1e-4, "G0 error bound above tolerance");
  double limit = 2.0 * gz.value - 1.0;
  auto table = green::return_probabilities(law, std::int64_t{1} << 17);
  double ratio =
      green::expected_ell2(table, std::int64_t{1} << 17) / double(1 << 17);
  c.require(std::fabs(ratio - limit) <= 0.02 * limit,
            "E ell2(2^17)/2^17 = " + fmt(ratio) + " vs 2G0-1 = " + fmt(limit));

  const std::int64_t n = 4096, reps = 10000;
  double expect = green::expected_ell2(table, n);
  SiteCountMap scratch;
  double sum = 0.0, sum2 = 0.0;
  for (std::int64_t r = 0; r < reps; ++r) {
    rng::RandomStream s(777, rng::Purpose::walk, std::uint64_t(r));
    double v = est::ell2_of_walk(law, n, s, scratch);
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / double(reps);
  double sd = std::sqrt(std::max(0.0, sum2 / double(reps) - mean * mean));
  double se = sd / std::sqrt(double(reps));
  c.require(std::fabs(mean - expect) <= 4.0 * se,
            "MC mean " + fmt(mean) + " vs exact " + fmt(expect) + " (se " +
                fmt(se) + ")");
  if (c.ok)
    c.detail = "ratio " + fmt(ratio) + " vs " + fmt(limit) + "; MC gap " +
               fmt((mean - expect) / se) + " se";
  return c;
}

// ---------------------------------------------------------------------------
// 4. Gaussian closure: refined saddlepoint == exact conditional gaussian
//    tail to 1e-12 relative on 100 random fields; solver needs <= 3
//    iterations for gaussian scenery.
Check criterion4() {
  Check c;
  auto g = scenery::SceneryLaw::gaussian(1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    StepLaw law = i % 2 == 0 ? StepLaw::lazy(2 + i % 4) : StepLaw::simple(2 + i % 4);
    std::int64_t n = 32 + 16 * (i % 20);
    rng::RandomStream s(std::uint64_t(42000 + i), rng::Purpose::walk, 0);
    LocalTimeField f = walk::accumulate(walk::sample_path(law, n, s));
    double v = std::sqrt(f.ell2_d());
    double b = (1.0 + 0.04 * i) * v;
    auto tail = sp::saddlepoint_tail(f, g, b);
    double exact = sp::conditional_gaussian_tail(f, 1.0, b);
    double rel = std::fabs(tail.refined - exact) / exact;
    worst = std::max(worst, rel);
    c.require(rel <= 1e-12, "closure off by " + fmt(rel) + " at field " +
                                std::to_string(i));
    c.require(tail.tilt.iterations <= 3,
              "solver took " + std::to_string(tail.tilt.iterations) +
                  " iterations");
  }
  if (c.ok) c.detail = "worst relative gap " + fmt(worst);
  return c;
}

// ---------------------------------------------------------------------------
// 5. IS unbiasedness on a fixed 13-site rademacher field (seeded
//    self-avoiding d=2 path): estimate within 3 stderr of the enumerated
//    tail at b/V in {2,3,4}; the leading saddlepoint form within 25% of
//    exact at b/V = 3. b/V = 4 exceeds the support maximum (max X/V =
//    sqrt(13)), so both sides are exactly zero there.
Check criterion5() {
  Check c;
  StepLaw law = StepLaw::simple(2);
  rng::RandomStream s(62, rng::Purpose::walk, 0);
  LocalTimeField f = walk::accumulate(walk::sample_path(law, 13, s));
  c.require(f.occupied_sites() == 13, "frozen seed no longer yields 13 sites");
  auto rad = scenery::SceneryLaw::rademacher();
  double v = std::sqrt(f.ell2_d());

  for (double z : {2.0, 3.0, 4.0}) {
    double b = z * v;
    double exact = oracle::exact_conditional_tail(f, b).to_double();
    rng::RandomStream is(2025, rng::Purpose::tilt, std::uint64_t(z));
    auto e = sp::tilted_is_estimate(f, rad, b, 100000, is);
    c.require(std::fabs(e.p_hat - exact) <= 3.0 * e.stderr_ + 1e-15,
              "IS at z=" + fmt(z) + ": " + fmt(e.p_hat) + " vs exact " +
                  fmt(exact) + " (se " + fmt(e.stderr_) + ")");
    if (z == 4.0)
      c.require(exact == 0.0 && e.p_hat == 0.0,
                "z=4 should be the degenerate zero case");
    if (z == 3.0) {
      auto tail = sp::saddlepoint_tail(f, rad, b);
      c.require(std::fabs(tail.leading - exact) <= 0.25 * exact,
                "leading form " + fmt(tail.leading) + " vs exact " +
                    fmt(exact));
      if (c.ok)
        c.detail = "leading/exact at 3V = " + fmt(tail.leading / exact);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Refined normal asymptotics at desk scale: gaussian scenery, d=3 lazy,
//    n=1e4, b at the 4-sigma point of the predicted law (p ~ 3e-5, inside
//    [1e-5, 1e-3]); conditional estimate (1e4 walks) has log p-hat within
//    10% of the closed-form prediction. Runtime < 5 min.
Check criterion6() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  StepLaw law = StepLaw::lazy(3);
  auto g = scenery::SceneryLaw::gaussian(1.0);
  const std::int64_t n = 10000;
  double g0 = green::green_zero(law, 1e-4).value;
  double b = 4.0 * std::sqrt(double(n) * (2.0 * g0 - 1.0));
  double predicted = rates::rate_T1(double(n), b, 1.0, g0);
  c.require(predicted >= 1e-5 && predicted <= 1e-3,
            "predicted p outside [1e-5, 1e-3]");

  auto res = est::conditional_mc(law, g, n, b, 10000, 0, 31415);
  double rel = std::fabs(res.log_p_hat - std::log(predicted)) /
               std::fabs(std::log(predicted));
  c.require(rel <= 0.10, "log p-hat " + fmt(res.log_p_hat) + " vs log rate " +
                             fmt(std::log(predicted)) + " (rel " + fmt(rel) +
                             ")");
  double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.require(dt < 300.0, "runtime " + fmt(dt) + " s exceeds 5 min");
  if (c.ok)
    c.detail = "log gap " + fmt(rel * 100.0) + "% of " +
               fmt(std::log(predicted)) + ", " + fmt(dt) + " s";
  return c;
}

// ---------------------------------------------------------------------------
// 7. Moderate-deviation rate fit: n in {2^12, 2^13, 2^14}, b = n^0.6,
//    gaussian sigma = 0.3 (small, so the quantiles sit at 3.4-3.9 and the
//    normal-tail prefactor is subleading), d=3 lazy; fitted slope within
//    20% of -1/(2 sigma^2 (2G0-1)); residuals shrink monotonically.
Check criterion7() {
  Check c;
  StepLaw law = StepLaw::lazy(3);
  const double sigma = 0.3;
  auto g = scenery::SceneryLaw::gaussian(sigma);
  double g0 = green::green_zero(law, 1e-4).value;
  double target = -1.0 / (2.0 * sigma * sigma * (2.0 * g0 - 1.0));

  std::vector<est::RatePoint> pts;
  for (std::int64_t n : {std::int64_t{1} << 12, std::int64_t{1} << 13,
                         std::int64_t{1} << 14}) {
    double b = std::pow(double(n), 0.6);
    auto res = est::conditional_mc(law, g, n, b, 10000, 0, 2718);
    pts.push_back({double(n), b, res.log_p_hat});
  }
  auto fit = est::empirical_rate(pts, est::RateModel::T2);
  double rel = std::fabs(fit.slope - target) / std::fabs(target);
  c.require(rel <= 0.20, "slope " + fmt(fit.slope) + " vs target " +
                             fmt(target) + " (rel " + fmt(rel) + ")");

  // corrections to the asymptote must shrink as n grows
  std::vector<double> corr;
  for (const auto& p : pts)
    corr.push_back(p.log_p - target * (p.b * p.b / p.n));
  c.require(corr[1] < corr[0] && corr[2] < corr[1],
            "residual trend not monotone toward the limit");
  if (c.ok)
    c.detail = "slope " + fmt(fit.slope) + " vs " + fmt(target) + " (" +
               fmt(rel * 100.0) + "%), R2 " + fmt(fit.r2);
  return c;
}

// ---------------------------------------------------------------------------
// 8. Rate-function algebra: I(a) branch agreement at the crossover equals
//    1/(2 pi kappa^4) to 1e-12 over 1000 random draws; the exponential-
//    scenery prefactor matches a golden-section minimisation of
//    D/x + 2 K2 x/(2-beta) to 1e-10; normal tail within 1e-10 of the
//    50-digit reference on [0.1, 8].
Check criterion8() {
  Check c;
  rng::RandomStream s(8888, rng::Purpose::selftest);
  for (int i = 0; i < 1000; ++i) {
    double sigma2 = 0.1 + 3.0 * s.next_unit();
    double det = 0.01 + 2.0 * s.next_unit();
    double kappa = 0.3 + 2.0 * s.next_unit();
    double astar = rates::rate_T3c_crossover(sigma2, det, kappa);
    double k2 = kappa * kappa;
    double want = 1.0 / (2.0 * 3.14159265358979323846 * k2 * k2);
    for (double a : {astar * (1.0 - 1e-13), astar * (1.0 + 1e-13)}) {
      double got = rates::rate_T3c(a, sigma2, det, kappa);
      c.require(std::fabs(got - want) <= 1e-12 * want,
                "I(a) crossover gap " + fmt(std::fabs(got - want) / want));
    }
  }

  const double phi = 0.6180339887498948482;
  for (int i = 0; i < 200; ++i) {
    double D = 0.2 + 3.0 * s.next_unit();
    double K2 = 0.1 + 2.0 * s.next_unit();
    double beta = 1.0 + 0.9 * s.next_unit();
    auto obj = [&](double x) { return D / x + 2.0 * K2 * x / (2.0 - beta); };
    double lo = 1e-8, hi = 1e8;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    for (int it = 0; it < 200; ++it) {
      if (obj(x1) < obj(x2)) hi = x2;
      else lo = x1;
      x1 = hi - phi * (hi - lo);
      x2 = lo + phi * (hi - lo);
    }
    double numeric = obj(0.5 * (lo + hi));
    double n = 1e8, b = 1e9;
    double got = rates::rate_special(n, b, D, beta, K2);
    double want = -std::sqrt(b / std::log(n)) * numeric;
    c.require(std::fabs(got - want) <= 1e-10 * std::fabs(want),
              "special rate vs minimiser gap " +
                  fmt(std::fabs(got - want) / std::fabs(want)));
  }

  struct Ref {
    double x, value;
  };
  // reference values computed once with 50-digit arithmetic
  const Ref refs[] = {
      {0.1, 0.460172162722971},      {0.5, 0.3085375387259869},
      {1.0, 0.15865525393145705},    {1.5, 0.06680720126885807},
      {2.0, 0.022750131948179207},   {2.5, 0.006209665325776135},
      {3.0, 0.0013498980316300946},  {3.5, 0.00023262907903552504},
      {4.0, 3.1671241833119924e-05}, {4.5, 3.3976731247300603e-06},
      {5.0, 2.8665157187919391e-07}, {5.5, 1.8989562465887718e-08},
      {6.0, 9.86587645037698e-10},   {6.5, 4.016000583859118e-11},
      {7.0, 1.279812543885835e-12},  {7.5, 3.1908916729108963e-14},
      {8.0, 6.220960574271784e-16},
  };
  for (const auto& r : refs)
    c.require(std::fabs(rates::mills_tail(r.x) - r.value) <= 1e-10 * r.value,
              "normal tail off at x=" + fmt(r.x));
  if (c.ok) c.detail = "1000 crossover draws, 200 minimiser draws, 17 tail points";
  return c;
}

// ---------------------------------------------------------------------------
// 9. Maximal local time, d=3 lazy, n=1e4, 1e6 replicas: the empirical tail
//    of ell_n(0) is dominated by q-hat^k (5 stderr slack) for k <= 10, and
//    the log-linear slope sits within 15% of log q-hat.
Check criterion9() {
  Check c;
  StepLaw law = StepLaw::lazy(3);
  std::vector<std::int64_t> ks;
  for (std::int64_t k = 1; k <= 10; ++k) ks.push_back(k);
  auto tab = est::max_local_time_tail(law, 10000, ks, 1000000, 1618, 0);
  for (const auto& row : tab.rows) {
    double slack = 5.0 * (row.stderr_ +
                          double(row.k) *
                              std::pow(tab.q_hat, double(row.k - 1)) *
                              tab.q_stderr);
    c.require(row.p_hat <= row.geometric_bound + slack,
              "domination fails at k=" + std::to_string(row.k) + ": " +
                  fmt(row.p_hat) + " vs " + fmt(row.geometric_bound));
  }
  c.require(std::fabs(tab.slope_vs_log_q - 1.0) <= 0.15,
            "slope/log q = " + fmt(tab.slope_vs_log_q));
  if (c.ok)
    c.detail = "q-hat " + fmt(tab.q_hat) + ", slope/log q " +
               fmt(tab.slope_vs_log_q);
  return c;
}

// ---------------------------------------------------------------------------
// 10. Concentration shape, d=3 lazy, n=2^14, 1e5 replicas: the two-sided
//     tail is non-increasing, and log P regressed on x^{2/3}/n^{1/3} over
//     the visible range (>= 30 exceedances, x >= one deviation scale) has
//     negative slope with R^2 > 0.9.
Check criterion10() {
  Check c;
  StepLaw law = StepLaw::lazy(3);
  const std::int64_t n = std::int64_t{1} << 14;
  auto table = green::return_probabilities(law, n);

  auto pilot = est::ell2_concentration(law, n, {}, 100000, 4242, table, 0);
  double mean = 0.0;
  for (double v : pilot.ell2_samples) mean += v;
  mean /= double(pilot.ell2_samples.size());
  double sd = 0.0;
  for (double v : pilot.ell2_samples) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / double(pilot.ell2_samples.size()));

  std::vector<double> grid;
  for (int i = 1; i <= 14; ++i) grid.push_back(0.25 * i * sd);
  // reuse the pilot samples: tails are deterministic functions of them
  est::ConcentrationTable tab;
  tab.expected_ell2 = pilot.expected_ell2;
  tab.ell2_samples = pilot.ell2_samples;
  const double replicas = double(pilot.ell2_samples.size());
  double prev = 1.0;
  std::vector<double> xs, ys;
  for (double x : grid) {
    std::int64_t two = 0;
    for (double v : pilot.ell2_samples)
      two += std::fabs(v - pilot.expected_ell2) >= x;
    double p = double(two) / replicas;
    c.require(p <= prev + 1e-12, "two-sided tail not monotone");
    prev = p;
    if (two >= 30 && x >= sd) {
      xs.push_back(std::pow(x, 2.0 / 3.0) / std::cbrt(double(n)));
      ys.push_back(std::log(p));
    }
  }
  c.require(xs.size() >= 4, "visible range too short for the shape fit");
  if (c.ok) {
    double m = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    double intercept = (sy - slope * sx) / m;
    double ss_res = 0, ss_tot = 0, ybar = sy / m;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double e = ys[i] - intercept - slope * xs[i];
      ss_res += e * e;
      ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    double r2 = 1.0 - ss_res / ss_tot;
    c.require(slope < 0.0, "shape slope not negative");
    c.require(r2 > 0.9, "R^2 = " + fmt(r2));
    if (c.ok)
      c.detail = "slope " + fmt(slope) + ", R2 " + fmt(r2) + ", " +
                 std::to_string(xs.size()) + " points";
  }
  return c;
}

// ---------------------------------------------------------------------------
// 11. Reproducibility: the same CLI config produces byte-identical
//     results.csv for any worker count, both in-process and through the
//     installed binary.
Check criterion11() {
  Check c;
  const std::string config =
      "experiment = conditional_mc\nd = 3\nwalk = lazy\nscenery = gaussian\n"
      "scenery_param = 1.0\nn = 512\nb = 120\nreplicas = 2000\n"
      "inner_replicas = 0\nseed = 11\n";
  auto one = run::run_experiment(config, std::nullopt, 1);
  auto four = run::run_experiment(config, std::nullopt, 4);
  c.require(one.results_csv == four.results_csv,
            "in-process CSV differs between 1 and 4 workers");

  fs::path dir1 = fs::temp_directory_path() / "scenerylab_acc_w1";
  fs::path dir2 = fs::temp_directory_path() / "scenerylab_acc_w2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  fs::create_directories(dir1);
  fs::path cfg = dir1 / "cfg.txt";
  std::ofstream(cfg) << config;
  std::string base = std::string(SCENERYLAB_CLI_PATH) + " run --config " +
                     cfg.string();
  int rc1 = std::system(
      (base + " --out " + dir1.string() + " --workers 1 > /dev/null").c_str());
  int rc2 = std::system(
      (base + " --out " + dir2.string() + " --workers 2 > /dev/null").c_str());
  c.require(rc1 == 0 && rc2 == 0, "CLI run failed");
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string csv1 = slurp(dir1 / "results.csv");
  c.require(!csv1.empty() && csv1 == slurp(dir2 / "results.csv"),
            "CLI results.csv differs between worker counts");
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  if (c.ok) c.detail = "bit-identical across reruns and worker counts";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> fn;
  };
  const Criterion criteria[] = {
      {"1 exact identity suite", criterion1},
      {"2 oracle equivalence", criterion2},
      {"3 expected self-intersection", criterion3},
      {"4 gaussian closure of the tilt machinery", criterion4},
      {"5 importance-sampling unbiasedness", criterion5},
      {"6 refined asymptotics at desk scale", criterion6},
      {"7 moderate-deviation rate fit", criterion7},
      {"8 rate-function algebra", criterion8},
      {"9 maximal local time tail", criterion9},
      {"10 concentration shape", criterion10},
      {"11 reproducibility", criterion11},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = crit.fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
    std::printf("[%s] %s (%.1f s)%s%s\n", result.ok ? "PASS" : "FAIL",
                crit.name, dt, result.detail.empty() ? "" : " - ",
                result.detail.c_str());
    std::fflush(stdout);
    failures += result.ok ? 0 : 1;
  }
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}

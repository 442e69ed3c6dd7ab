// Top-level Monte Carlo experiments. Replicas are pure functions of
// (seed, replica index); workers only partition the index range, and the
// reduction always runs in index order, so results are bit-identical for
// any worker count.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenerylab/green.hpp"
#include "scenerylab/lattice.hpp"
#include "scenerylab/local_time.hpp"
#include "scenerylab/rng.hpp"
#include "scenerylab/scenery.hpp"

namespace scenerylab::est {

struct EstimateResult {
  double p_hat = 0.0;
  double log_p_hat = 0.0;
  double stderr_ = 0.0;
  std::int64_t replicas = 0;
  std::string estimator;  // naive | conditional-exact | conditional-IS
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::string flags;  // empty when clean
};

// Derive an independent 64-bit subseed for (seed, purpose, index).
std::uint64_t derive_seed(std::uint64_t seed, rng::Purpose purpose,
                          std::uint64_t index);

// Streaming one-replica kernels (no path storage).
LocalTimeField sample_field(const StepLaw& law, std::int64_t n,
                            rng::RandomStream& stream, SiteCountMap& scratch);

struct OriginStats {
  std::int64_t visits = 0;        // ell_n(0)
  std::int64_t first_visit = 0;   // T_0, or n+1 when the walk never returns
};
OriginStats origin_visits(const StepLaw& law, std::int64_t n,
                          rng::RandomStream& stream);

double ell2_of_walk(const StepLaw& law, std::int64_t n,
                    rng::RandomStream& stream, SiteCountMap& scratch);

// Fraction of replicas with X_n >= b, binomial standard error.
// predicted_p > 0 enables the rare-event budget guard.
EstimateResult naive_mc(const StepLaw& law, const scenery::SceneryLaw& scen,
                        std::int64_t n, double b, std::int64_t replicas,
                        std::uint64_t seed, int workers = 0,
                        double predicted_p = -1.0);

// Rao-Blackwellised estimator: outer walks, inner conditional tail
// (exact for gaussian scenery, tilted importance sampling otherwise).
EstimateResult conditional_mc(const StepLaw& law,
                              const scenery::SceneryLaw& scen, std::int64_t n,
                              double b, std::int64_t walk_replicas,
                              std::int64_t inner_replicas, std::uint64_t seed,
                              int workers = 0);

enum class RateModel { T2, T3a, T3b };

struct RatePoint {
  double n;
  double b;
  double log_p;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;
  std::vector<double> residuals;
};

// Least squares of log p against the regime regressor
// (T2: b^2/n, T3a: b^2/(n log n), T3b: b/sqrt(n)).
RateFit empirical_rate(const std::vector<RatePoint>& points, RateModel model);

struct ConcentrationRow {
  double x;
  double p_two, p_up, p_down;
  double stderr_two;
  double diag_d3, diag_d4, diag_dgt4;  // x^{2/3}/n^{1/3}, x^{1/2}/log^{3/2} n, x^{1/2}/log n
};

struct ConcentrationTable {
  double expected_ell2;
  std::vector<double> ell2_samples;  // replica order
  std::vector<ConcentrationRow> rows;
};

// Build tail rows from already-sampled ell2 values (pure, reusable when
// the grid is derived from the samples themselves).
std::vector<ConcentrationRow> concentration_rows(
    const std::vector<double>& ell2_samples, double expected_ell2,
    std::int64_t n, const std::vector<double>& x_grid);

ConcentrationTable ell2_concentration(const StepLaw& law, std::int64_t n,
                                      const std::vector<double>& x_grid,
                                      std::int64_t replicas, std::uint64_t seed,
                                      const green::ReturnProbTable& table,
                                      int workers = 0);

struct MaxTailRow {
  std::int64_t k;
  double p_hat;
  double stderr_;
  double geometric_bound;  // q_hat^k
};

struct MaxTailTable {
  double q_hat;          // P{T_0 <= n}
  double q_stderr;
  std::vector<MaxTailRow> rows;
  double slope;          // fit of log p_hat on k over usable rows
  double slope_vs_log_q; // slope / log(q_hat)
};

MaxTailTable max_local_time_tail(const StepLaw& law, std::int64_t n,
                                 const std::vector<std::int64_t>& k_grid,
                                 std::int64_t replicas, std::uint64_t seed,
                                 int workers = 0);

}  // namespace scenerylab::est

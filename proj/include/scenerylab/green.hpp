// Lattice return probabilities and derived expectations.
//
// Two exact routes to P{S_k = 0}:
//   - axis laws (support within {0, +-e_j}): sequential binomial
//     conditioning over axes, O(d K^2) time, O(K) memory;
//   - general laws: dense convolution over the reachable box, memory
//     budgeted.
// Entries beyond the exact horizon are filled with the local-limit form
// c k^{-d/2}, c fitted on the last exact octave.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenerylab/lattice.hpp"

namespace scenerylab::green {

struct GreenOptions {
  std::int64_t exact_cap = 0;          // 0 = method default
  std::size_t memory_budget = std::size_t{2} << 30;  // box route, bytes
};

struct ReturnProbTable {
  std::uint64_t law_hash = 0;
  int d = 0;
  std::int64_t horizon = 0;        // entries 0..horizon
  std::int64_t exact_horizon = 0;  // entries <= this are exact
  double fit_c = 0.0;              // local-limit coefficient of the tail fill
  std::vector<double> p0;

  bool exact(std::int64_t k) const { return k <= exact_horizon; }
  const char* method_tag(std::int64_t k) const {
    return exact(k) ? "exact-convolution" : "local-limit";
  }
};

ReturnProbTable return_probabilities(const StepLaw& law, std::int64_t horizon,
                                     const GreenOptions& opts = {});

// Exact p0 for axis laws only; helper shared with tests.
std::vector<double> axis_return_probs(const StepLaw& law, std::int64_t horizon);

// Dense-box convolution route (any finite-support law); throws when two
// box buffers exceed the memory budget.
std::vector<double> box_return_probs(const StepLaw& law, std::int64_t horizon,
                                     std::size_t memory_budget);

struct GreenZero {
  double value = 0.0;
  double error_bound = 0.0;
  std::int64_t exact_horizon = 0;
};

// G(0) = sum_k P{S_k = 0}; d >= 3 only. The returned bound covers the
// envelope 1.5 c sum_{k>K} k^{-d/2} past the certified horizon.
GreenZero green_zero(const StepLaw& law, double tol,
                     const GreenOptions& opts = {});

// E ell_n^(2) = n + 2 sum_{k=1}^{n-1} (n-k) P{S_k=0}.
double expected_ell2(const ReturnProbTable& table, std::int64_t n);

// E ell_n^(3) = n + 6 sum_{k}(n-k) p0[k]
//             + 6 sum_{j,k >= 1, j+k <= n-1} (n-j-k) p0[j] p0[k].
double expected_ell3(const ReturnProbTable& table, std::int64_t n);

// (sum_{k=1}^n P{S_k=0}) / log n; d = 2 only, n >= 16.
double estimate_K2(const ReturnProbTable& table, std::int64_t n);

// sum_z G_n(z)^2 via the symmetric pair-collision identity
//   sum_z G_n(z)^2 = sum_{j,k=0}^{n} P{S_{j+k} = 0},
// so only return probabilities up to 2n are needed.
double sum_Gn_squared(const ReturnProbTable& table, std::int64_t n);

// Same quantity summed literally over the box; small n / low d only.
double sum_Gn_squared_direct(const StepLaw& law, std::int64_t n,
                             std::size_t memory_budget = std::size_t{2} << 30);

// Versioned binary cache; a cache hit reproduces the table bit-for-bit.
void save_table(const ReturnProbTable& table, const std::string& path);
ReturnProbTable load_table(const std::string& path);

// sum_{k>K} k^{-s} for s > 1, to near machine precision.
double power_tail_sum(double s, std::int64_t K);

}  // namespace scenerylab::green

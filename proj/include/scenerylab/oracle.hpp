// Brute-force ground truth at tiny scale: exhaustive path enumeration with
// exact rational arithmetic, exhaustive scenery enumeration, and exact
// two-walk moments. Everything here is an independent route used to pin the
// fast implementations down.

#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scenerylab/lattice.hpp"
#include "scenerylab/local_time.hpp"

namespace scenerylab::oracle {

using BigInt = boost::multiprecision::cpp_int;

struct BigRational {
  BigInt num;
  BigInt den;

  double to_double() const {
    return num.convert_to<double>() / den.convert_to<double>();
  }
};

struct WalkExpectations {
  std::int64_t n = 0;
  BigRational e_ell2;
  BigRational e_ell3;
  std::map<std::uint32_t, BigRational> ell_inf_distribution;
  std::vector<BigRational> p0;  // exact P{S_k = 0}, k = 0..n
};

// Exact expectations over all |support|^n paths; the law must carry
// rational probabilities. Budget: |support|^n <= 1e8 configurations.
WalkExpectations enumerate_walk_expectations(const StepLaw& law,
                                             std::int64_t n);

// Exact P{sum_z ell(z) xi(z) >= b} for rademacher scenery by enumerating
// all 2^sites sign choices; at most 20 occupied sites.
BigRational exact_conditional_tail(const LocalTimeField& field, double b);

struct TwoWalkMoments {
  BigRational e_a1, e_a2, e_a3;  // E A_n, E A_n^2, E A_n^3
  BigRational e_lambda, e_lambda_star;
};

// Enumeration over ordered pairs of paths; budget |support|^{2n} <= 1e8.
TwoWalkMoments exact_two_walk_moments(const StepLaw& law, std::int64_t n);

// Independent closed forms from return probabilities (symmetric laws):
//   E A_n      = sum_{i=1..n} sum_{j=0..n-1} p0[i+j]
//   E Lambda_n = sum_{i=1..n} sum_{j,k=0..n-1} p0[i+min(j,k)] p0[|j-k|]
double expected_pair_intersections(const std::vector<double>& p0,
                                   std::int64_t n);
double expected_triple_intersections(const std::vector<double>& p0,
                                     std::int64_t n);

}  // namespace scenerylab::oracle

// Walk paths, local-time accumulation, two-walk intersection counters and
// the dyadic block decomposition of the self-intersection local time.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scenerylab/lattice.hpp"
#include "scenerylab/local_time.hpp"
#include "scenerylab/rng.hpp"

namespace scenerylab::walk {

struct WalkPath {
  const StepLaw* law;
  std::int64_t n;
  std::vector<Site> positions;  // S_1..S_n; S_0 = origin implicit
};

// i.i.d. increments drawn from the law; bit-identical for a fixed stream.
WalkPath sample_path(const StepLaw& law, std::int64_t n, rng::RandomStream& stream);

LocalTimeField accumulate(const WalkPath& path);

// A_n = sum_{i=1..n} sum_{j=0..n-1} 1{S_i = S'_j}. The index ranges are
// deliberately asymmetric; j = 0 means the common origin.
std::int64_t pair_intersections(const WalkPath& a, const WalkPath& b);

struct TripleCounts {
  std::int64_t lambda;       // i in [1,n], j,k in [0,n-1]
  std::int64_t lambda_star;  // i in [0,n-1], j,k in [1,n]
};

TripleCounts triple_intersections(const WalkPath& a, const WalkPath& b);

// Centred cross-block coincidence counts A-bar_{j,k} for a path of length
// 2^N. terms[j-1][k-1] covers l in ((2k-2)2^{N-j}, (2k-1)2^{N-j}],
// m in ((2k-1)2^{N-j}, 2k 2^{N-j}]; centring uses return_probs[m-l].
struct DyadicTerms {
  int N;
  std::vector<std::vector<double>> terms;

  double total() const {
    double s = 0.0;
    for (const auto& row : terms)
      for (double v : row) s += v;
    return s;
  }
};

DyadicTerms dyadic_terms(const WalkPath& path,
                         const std::vector<double>& return_probs);

// Uncentred variant (integer): used by the pair-partition identity test.
std::int64_t dyadic_uncentred_total(const WalkPath& path);

}  // namespace scenerylab::walk

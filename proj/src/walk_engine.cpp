#include "scenerylab/walk_engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace scenerylab {

LocalTimeField::LocalTimeField(
    int d, std::int64_t n,
    std::vector<std::pair<SiteKey, std::uint32_t>> entries, bool already_sorted)
    : d_(d), n_(n), entries_(std::move(entries)) {
  if (!already_sorted) {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
      return key_less(a.first, b.first);
    });
  }
  u128 total = 0;
  for (const auto& [key, c] : entries_) {
    (void)key;
    if (c == 0) throw std::invalid_argument("LocalTimeField: zero count");
    u128 cc = c;
    total = checked_add(total, cc);
    ell2_ = checked_add(ell2_, cc * cc);
    ell3_ = checked_add(ell3_, cc * cc * cc);
    ell_inf_ = std::max(ell_inf_, c);
  }
  if (total != static_cast<u128>(n))
    throw std::invalid_argument("LocalTimeField: counts do not sum to n");
}

u128 q_fold(const LocalTimeField& field, int q) {
  if (q < 1) throw std::invalid_argument("q_fold: q must be >= 1");
  if (q == 1) return static_cast<u128>(field.steps());
  if (q == 2) return field.ell2();
  if (q == 3) return field.ell3();
  u128 sum = 0;
  for (const auto& [key, c] : field.entries()) {
    (void)key;
    u128 pw = 1;
    for (int i = 0; i < q; ++i) pw = checked_mul(pw, c);
    sum = checked_add(sum, pw);
  }
  return sum;
}

namespace walk {

WalkPath sample_path(const StepLaw& law, std::int64_t n,
                     rng::RandomStream& stream) {
  if (n < 1) throw std::invalid_argument("sample_path: n must be >= 1");
  WalkPath path{&law, n, {}};
  path.positions.reserve(static_cast<std::size_t>(n));
  Site pos{};
  int d = law.dim();
  for (std::int64_t k = 0; k < n; ++k) {
    Site step = law.draw_step(stream.next_u64());
    for (int i = 0; i < d; ++i) pos.c[i] += step.c[i];
    path.positions.push_back(pos);
  }
  return path;
}

LocalTimeField accumulate(const WalkPath& path) {
  SiteCountMap map(static_cast<std::size_t>(path.n) + 1);
  for (const auto& p : path.positions) map.increment(pack_site(p));
  return LocalTimeField(path.law->dim(), path.n, map.extract_sorted(), true);
}

namespace {

// occupancy of S_j for j in [lo, hi]; j = 0 contributes the origin
SiteCountMap occupancy(const WalkPath& p, std::int64_t lo, std::int64_t hi) {
  SiteCountMap map(static_cast<std::size_t>(hi - lo) + 2);
  for (std::int64_t j = lo; j <= hi; ++j) {
    if (j == 0) {
      map.increment(pack_site(Site{}));
    } else {
      map.increment(pack_site(p.positions[static_cast<std::size_t>(j - 1)]));
    }
  }
  return map;
}

void check_same_shape(const WalkPath& a, const WalkPath& b) {
  if (a.n != b.n)
    throw std::invalid_argument("two-walk counters: path lengths differ");
  if (a.law->dim() != b.law->dim())
    throw std::invalid_argument("two-walk counters: dimensions differ");
}

}  // namespace

std::int64_t pair_intersections(const WalkPath& a, const WalkPath& b) {
  check_same_shape(a, b);
  SiteCountMap occ_b = occupancy(b, 0, b.n - 1);
  std::int64_t total = 0;
  for (const auto& p : a.positions) total += occ_b.count(pack_site(p));
  return total;
}

TripleCounts triple_intersections(const WalkPath& a, const WalkPath& b) {
  check_same_shape(a, b);
  TripleCounts out{0, 0};
  {
    SiteCountMap occ_b = occupancy(b, 0, b.n - 1);
    for (const auto& p : a.positions) {
      std::int64_t c = occ_b.count(pack_site(p));
      out.lambda += c * c;
    }
  }
  {
    SiteCountMap occ_b = occupancy(b, 1, b.n);
    Site origin{};
    std::int64_t c0 = occ_b.count(pack_site(origin));
    out.lambda_star += c0 * c0;  // i = 0 term
    for (std::int64_t i = 1; i <= a.n - 1; ++i) {
      std::int64_t c =
          occ_b.count(pack_site(a.positions[static_cast<std::size_t>(i - 1)]));
      out.lambda_star += c * c;
    }
  }
  return out;
}

namespace {

int log2_exact(std::int64_t n) {
  int N = 0;
  std::int64_t v = 1;
  while (v < n) {
    v <<= 1;
    ++N;
  }
  if (v != n)
    throw std::invalid_argument("dyadic decomposition needs a power-of-two length");
  return N;
}

}  // namespace

DyadicTerms dyadic_terms(const WalkPath& path,
                         const std::vector<double>& return_probs) {
  int N = log2_exact(path.n);
  if (static_cast<std::int64_t>(return_probs.size()) < path.n)
    throw std::invalid_argument("dyadic_terms: return_probs shorter than path");

  DyadicTerms out;
  out.N = N;
  out.terms.resize(static_cast<std::size_t>(N));
  for (int j = 1; j <= N; ++j) {
    std::int64_t half = std::int64_t{1} << (N - j);
    auto& row = out.terms[static_cast<std::size_t>(j - 1)];
    row.resize(std::size_t{1} << (j - 1));
    for (std::int64_t k = 1; k <= (std::int64_t{1} << (j - 1)); ++k) {
      std::int64_t l_lo = (2 * k - 2) * half + 1, l_hi = (2 * k - 1) * half;
      std::int64_t m_lo = (2 * k - 1) * half + 1, m_hi = 2 * k * half;
      std::int64_t hits = 0;
      for (std::int64_t l = l_lo; l <= l_hi; ++l) {
        const Site& sl = path.positions[static_cast<std::size_t>(l - 1)];
        for (std::int64_t m = m_lo; m <= m_hi; ++m) {
          if (path.positions[static_cast<std::size_t>(m - 1)] == sl) ++hits;
        }
      }
      // centre: sum over the same index set of P{S_l = S_m} = p0[m-l]
      double centre = 0.0;
      for (std::int64_t gap = m_lo - l_hi; gap <= m_hi - l_lo; ++gap) {
        std::int64_t lo = std::max(l_lo, m_lo - gap);
        std::int64_t hi = std::min(l_hi, m_hi - gap);
        if (hi >= lo)
          centre += static_cast<double>(hi - lo + 1) *
                    return_probs[static_cast<std::size_t>(gap)];
      }
      row[static_cast<std::size_t>(k - 1)] =
          static_cast<double>(hits) - centre;
    }
  }
  return out;
}

std::int64_t dyadic_uncentred_total(const WalkPath& path) {
  int N = log2_exact(path.n);
  std::int64_t total = 0;
  for (int j = 1; j <= N; ++j) {
    std::int64_t half = std::int64_t{1} << (N - j);
    for (std::int64_t k = 1; k <= (std::int64_t{1} << (j - 1)); ++k) {
      std::int64_t l_lo = (2 * k - 2) * half + 1, l_hi = (2 * k - 1) * half;
      std::int64_t m_lo = (2 * k - 1) * half + 1, m_hi = 2 * k * half;
      for (std::int64_t l = l_lo; l <= l_hi; ++l) {
        const Site& sl = path.positions[static_cast<std::size_t>(l - 1)];
        for (std::int64_t m = m_lo; m <= m_hi; ++m) {
          if (path.positions[static_cast<std::size_t>(m - 1)] == sl) ++total;
        }
      }
    }
  }
  return total;
}

}  // namespace walk
}  // namespace scenerylab

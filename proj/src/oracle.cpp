#include "scenerylab/oracle.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace scenerylab::oracle {

namespace {

constexpr double kBudget = 1e8;

// integer weights: step i carries L / den_i * num_i where L = lcm of the
// support denominators; a path of n steps then has probability
// (product of weights) / L^n exactly.
struct RationalLaw {
  std::int64_t lcm;
  std::vector<std::int64_t> weights;
  std::vector<Site> steps;
};

RationalLaw rational_law(const StepLaw& law) {
  if (!law.rational())
    throw std::invalid_argument("oracle: law must carry rational probabilities");
  std::int64_t lcm = 1;
  for (const auto& sp : law.support())
    lcm = std::lcm(lcm, sp.den);
  RationalLaw out;
  out.lcm = lcm;
  for (const auto& sp : law.support()) {
    out.weights.push_back(sp.num * (lcm / sp.den));
    out.steps.push_back(sp.step);
  }
  return out;
}

BigInt big_pow(std::int64_t base, std::int64_t exp) {
  BigInt b = base, r = 1;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

void check_budget(std::size_t support, std::int64_t n, int pairs) {
  double configs = std::pow(double(support), double(pairs * n));
  if (configs > kBudget)
    throw std::invalid_argument("oracle: state-space budget exceeded (" +
                                std::to_string(configs) + " configurations)");
}

}  // namespace

WalkExpectations enumerate_walk_expectations(const StepLaw& law,
                                             std::int64_t n) {
  if (n < 1) throw std::invalid_argument("oracle: n must be >= 1");
  check_budget(law.support().size(), n, 1);
  RationalLaw rl = rational_law(law);
  const int d = law.dim();

  // iterative DFS with explicit undo; occupancy counts kept in a plain map
  std::vector<Site> pos(static_cast<std::size_t>(n) + 1);
  std::vector<std::size_t> choice(static_cast<std::size_t>(n) + 1, 0);
  std::vector<std::int64_t> weight(static_cast<std::size_t>(n) + 1, 1);
  std::map<SiteKey, std::uint32_t, bool (*)(const SiteKey&, const SiteKey&)>
      occ(key_less);

  std::int64_t ell2 = 0, ell3 = 0;
  BigInt sum_ell2 = 0, sum_ell3 = 0;
  std::map<std::uint32_t, BigInt> inf_counts;
  std::vector<BigInt> p0_weight(static_cast<std::size_t>(n) + 1, BigInt(0));
  p0_weight[0] = 1;

  std::int64_t depth = 1;
  pos[0] = Site{};
  while (depth >= 1) {
    std::size_t s = choice[static_cast<std::size_t>(depth)];
    if (s == rl.steps.size()) {
      choice[static_cast<std::size_t>(depth)] = 0;
      --depth;
      if (depth >= 1) {
        // undo the move made at this depth
        const SiteKey k = pack_site(pos[static_cast<std::size_t>(depth)]);
        std::uint32_t c = occ[k]--;
        if (occ[k] == 0) occ.erase(k);
        std::int64_t cc = c - 1;
        ell2 -= 2 * cc + 1;
        ell3 -= 3 * cc * cc + 3 * cc + 1;
        ++choice[static_cast<std::size_t>(depth)];
      }
      continue;
    }

    Site cur = pos[static_cast<std::size_t>(depth - 1)];
    for (int i = 0; i < d; ++i) cur.c[i] += rl.steps[s].c[i];
    pos[static_cast<std::size_t>(depth)] = cur;
    weight[static_cast<std::size_t>(depth)] =
        weight[static_cast<std::size_t>(depth - 1)] * rl.weights[s];

    SiteKey k = pack_site(cur);
    std::uint32_t before = occ[k]++;
    ell2 += 2 * std::int64_t(before) + 1;
    ell3 += 3 * std::int64_t(before) * before + 3 * std::int64_t(before) + 1;

    bool at_origin = true;
    for (int i = 0; i < d; ++i) at_origin &= cur.c[i] == 0;
    if (at_origin)
      p0_weight[static_cast<std::size_t>(depth)] +=
          weight[static_cast<std::size_t>(depth)];

    if (depth == n) {
      sum_ell2 += BigInt(weight[static_cast<std::size_t>(depth)]) * ell2;
      sum_ell3 += BigInt(weight[static_cast<std::size_t>(depth)]) * ell3;
      std::uint32_t mx = 0;
      for (const auto& [key, c] : occ) {
        (void)key;
        mx = std::max(mx, c);
      }
      inf_counts[mx] += weight[static_cast<std::size_t>(depth)];
      // undo and advance
      std::uint32_t c = occ[k]--;
      if (occ[k] == 0) occ.erase(k);
      std::int64_t cc = c - 1;
      ell2 -= 2 * cc + 1;
      ell3 -= 3 * cc * cc + 3 * cc + 1;
      ++choice[static_cast<std::size_t>(depth)];
    } else {
      ++depth;
    }
  }

  WalkExpectations out;
  out.n = n;
  BigInt den_n = big_pow(rl.lcm, n);
  out.e_ell2 = {sum_ell2, den_n};
  out.e_ell3 = {sum_ell3, den_n};
  for (const auto& [count, w] : inf_counts)
    out.ell_inf_distribution[count] = {w, den_n};
  out.p0.resize(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k)
    out.p0[static_cast<std::size_t>(k)] = {p0_weight[static_cast<std::size_t>(k)],
                                           big_pow(rl.lcm, k)};
  return out;
}

BigRational exact_conditional_tail(const LocalTimeField& field, double b) {
  const std::size_t m = field.occupied_sites();
  if (m > 20)
    throw std::invalid_argument(
        "exact_conditional_tail: more than 20 occupied sites");
  std::vector<std::int64_t> counts;
  counts.reserve(m);
  for (const auto& [key, c] : field.entries()) {
    (void)key;
    counts.push_back(c);
  }
  std::int64_t favourable = 0;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::int64_t x = 0;
    for (std::size_t i = 0; i < m; ++i)
      x += (mask >> i) & 1 ? counts[i] : -counts[i];
    if (double(x) >= b) ++favourable;
  }
  return {BigInt(favourable), BigInt(1) << m};
}

TwoWalkMoments exact_two_walk_moments(const StepLaw& law, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("oracle: n must be >= 1");
  check_budget(law.support().size(), n, 2);
  RationalLaw rl = rational_law(law);
  const int d = law.dim();
  const std::size_t S = rl.steps.size();

  // enumerate all paths once, storing positions and weights
  std::vector<std::vector<Site>> paths;  // S_0..S_n
  std::vector<std::int64_t> weights;
  {
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    bool done = false;
    while (!done) {
      std::vector<Site> p(static_cast<std::size_t>(n) + 1);
      std::int64_t w = 1;
      for (std::int64_t k = 0; k < n; ++k) {
        const auto s = digits[static_cast<std::size_t>(k)];
        Site cur = p[static_cast<std::size_t>(k)];
        for (int i = 0; i < d; ++i) cur.c[i] += rl.steps[s].c[i];
        p[static_cast<std::size_t>(k + 1)] = cur;
        w *= rl.weights[s];
      }
      paths.push_back(std::move(p));
      weights.push_back(w);
      std::size_t i = 0;
      for (;;) {
        if (++digits[i] < S) break;
        digits[i] = 0;
        if (++i == static_cast<std::size_t>(n)) {
          done = true;
          break;
        }
      }
    }
  }

  BigInt a1 = 0, a2 = 0, a3 = 0, lam = 0, lam_star = 0;
  for (std::size_t pa = 0; pa < paths.size(); ++pa) {
    for (std::size_t pb = 0; pb < paths.size(); ++pb) {
      std::int64_t a = 0, l = 0, ls = 0;
      for (std::int64_t i = 1; i <= n; ++i) {
        std::int64_t ci = 0;
        for (std::int64_t j = 0; j <= n - 1; ++j)
          ci += paths[pa][static_cast<std::size_t>(i)] ==
                        paths[pb][static_cast<std::size_t>(j)]
                    ? 1
                    : 0;
        a += ci;
        l += ci * ci;
      }
      for (std::int64_t i = 0; i <= n - 1; ++i) {
        std::int64_t ci = 0;
        for (std::int64_t j = 1; j <= n; ++j)
          ci += paths[pa][static_cast<std::size_t>(i)] ==
                        paths[pb][static_cast<std::size_t>(j)]
                    ? 1
                    : 0;
        ls += ci * ci;
      }
      BigInt w = BigInt(weights[pa]) * weights[pb];
      a1 += w * a;
      a2 += w * a * a;
      a3 += w * a * a * a;
      lam += w * l;
      lam_star += w * ls;
    }
  }
  BigInt den = big_pow(rl.lcm, 2 * n);
  return {{a1, den}, {a2, den}, {a3, den}, {lam, den}, {lam_star, den}};
}

double expected_pair_intersections(const std::vector<double>& p0,
                                   std::int64_t n) {
  double acc = 0.0;
  for (std::int64_t i = 1; i <= n; ++i)
    for (std::int64_t j = 0; j <= n - 1; ++j)
      acc += p0[static_cast<std::size_t>(i + j)];
  return acc;
}

double expected_triple_intersections(const std::vector<double>& p0,
                                     std::int64_t n) {
  double acc = 0.0;
  for (std::int64_t i = 1; i <= n; ++i)
    for (std::int64_t j = 0; j <= n - 1; ++j)
      for (std::int64_t k = 0; k <= n - 1; ++k)
        acc += p0[static_cast<std::size_t>(i + std::min(j, k))] *
               p0[static_cast<std::size_t>(std::abs(j - k))];
  return acc;
}

}  // namespace scenerylab::oracle

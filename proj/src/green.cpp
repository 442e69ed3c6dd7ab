#include "scenerylab/green.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace scenerylab::green {

namespace {

constexpr std::int64_t kDefaultAxisCap = 16384;

// one-dimensional simple-walk return probabilities r[m] = C(m, m/2) 2^-m
std::vector<double> simple1d_returns(std::int64_t K) {
  std::vector<double> r(static_cast<std::size_t>(K) + 1, 0.0);
  r[0] = 1.0;
  for (std::int64_t m = 2; m <= K; m += 2)
    r[static_cast<std::size_t>(m)] =
        r[static_cast<std::size_t>(m - 2)] * double(m - 1) / double(m);
  return r;
}

}  // namespace

std::vector<double> axis_return_probs(const StepLaw& law, std::int64_t horizon) {
  if (!law.is_axis_law())
    throw std::invalid_argument("axis_return_probs: law is not axis-supported");
  const std::int64_t K = horizon;
  std::vector<double> r = simple1d_returns(K);

  // Peel axes innermost-first. T[k] = P{return to 0 | k steps of the
  // partial law consisting of holds and the peeled axes}. Base case: only
  // holds remain, T[k] = 1. Each peel mixes with the binomial count of
  // steps spent on the new axis; the binomial weights are accumulated
  // relative to their peak, so nothing underflows, and they normalize via
  // sum B(k, m; q) = 1.
  std::vector<double> T(static_cast<std::size_t>(K) + 1, 1.0);
  std::vector<double> Tn(static_cast<std::size_t>(K) + 1, 0.0);
  double mass = law.hold_prob();
  const auto& axis = law.axis_probs();
  for (int j = law.dim() - 1; j >= 0; --j) {
    mass += 2.0 * axis[static_cast<std::size_t>(j)];
    double q = 2.0 * axis[static_cast<std::size_t>(j)] / mass;
    for (std::int64_t k = 0; k <= K; ++k) {
      if (q >= 1.0 - 1e-15) {
        Tn[static_cast<std::size_t>(k)] = r[static_cast<std::size_t>(k)] * T[0];
        continue;
      }
      const double ratio = q / (1.0 - q);
      std::int64_t mstar = std::min<std::int64_t>(
          k, static_cast<std::int64_t>((double(k) + 1.0) * q));
      double su = 0.0, sg = 0.0;
      double u = 1.0;
      for (std::int64_t m = mstar; m >= 0 && u > 1e-22; --m) {
        su += u;
        sg += u * r[static_cast<std::size_t>(m)] *
              T[static_cast<std::size_t>(k - m)];
        if (m > 0) u *= double(m) / (double(k - m + 1) * ratio);
      }
      u = double(k - mstar) / double(mstar + 1) * ratio;
      for (std::int64_t m = mstar + 1; m <= k && u > 1e-22; ++m) {
        su += u;
        sg += u * r[static_cast<std::size_t>(m)] *
              T[static_cast<std::size_t>(k - m)];
        u *= double(k - m) / double(m + 1) * ratio;
      }
      Tn[static_cast<std::size_t>(k)] = sg / su;
    }
    std::swap(T, Tn);
  }
  return T;
}

std::vector<double> box_return_probs(const StepLaw& law, std::int64_t horizon,
                                     std::size_t memory_budget) {
  const int d = law.dim();
  const int r = law.support_radius();
  const std::int64_t R = r * horizon;  // reachable radius at the last step
  const std::int64_t side = 2 * R + 1;
  double cells = 1.0;
  for (int i = 0; i < d; ++i) cells *= double(side);
  if (cells * 2.0 * sizeof(double) > double(memory_budget))
    throw std::runtime_error(
        "box_return_probs: memory budget exceeded at horizon " +
        std::to_string(horizon));

  const std::size_t total = static_cast<std::size_t>(cells);
  std::vector<double> cur(total, 0.0), next(total, 0.0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  stride[0] = 1;
  for (int i = 1; i < d; ++i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(side);
  auto index_of = [&](const Site& s) {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i)
      idx += static_cast<std::size_t>(s.c[i] + R) * stride[static_cast<std::size_t>(i)];
    return idx;
  };

  cur[index_of(Site{})] = 1.0;
  std::vector<double> p0(static_cast<std::size_t>(horizon) + 1, 0.0);
  p0[0] = 1.0;

  // precompute signed linear offsets of the support
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> probs;
  for (const auto& sp : law.support()) {
    std::ptrdiff_t off = 0;
    for (int i = 0; i < d; ++i)
      off += static_cast<std::ptrdiff_t>(sp.step.c[i]) *
             static_cast<std::ptrdiff_t>(stride[static_cast<std::size_t>(i)]);
    offsets.push_back(off);
    probs.push_back(sp.p);
  }

  for (std::int64_t k = 1; k <= horizon; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    // iterate only the box reachable by step k-1 to keep early steps cheap
    const std::int64_t Rk = r * (k - 1);
    std::vector<std::int64_t> coord(static_cast<std::size_t>(d), -Rk);
    bool done = false;
    while (!done) {
      std::size_t idx = 0;
      for (int i = 0; i < d; ++i)
        idx += static_cast<std::size_t>(coord[static_cast<std::size_t>(i)] + R) *
               stride[static_cast<std::size_t>(i)];
      double mass = cur[idx];
      if (mass != 0.0) {
        for (std::size_t s = 0; s < offsets.size(); ++s)
          next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) +
                                        offsets[s])] += mass * probs[s];
      }
      int i = 0;
      for (;;) {
        if (++coord[static_cast<std::size_t>(i)] <= Rk) break;
        coord[static_cast<std::size_t>(i)] = -Rk;
        if (++i == d) {
          done = true;
          break;
        }
      }
    }
    std::swap(cur, next);
    p0[static_cast<std::size_t>(k)] = cur[index_of(Site{})];
  }
  return p0;
}

namespace {

// c fitted on the last exact octave with the local-limit slope -d/2 held
// fixed; periodic laws (zero entries on one parity) get the nonzero
// fraction folded in so that tail *sums* come out right.
double fit_tail_coefficient(const std::vector<double>& p0, int d,
                            std::int64_t exact_horizon) {
  std::int64_t lo = std::max<std::int64_t>(1, exact_horizon / 2 + 1);
  double acc = 0.0;
  std::int64_t nonzero = 0, count = 0;
  for (std::int64_t k = lo; k <= exact_horizon; ++k) {
    ++count;
    double v = p0[static_cast<std::size_t>(k)];
    if (v > 0.0) {
      ++nonzero;
      acc += std::log(v) + 0.5 * double(d) * std::log(double(k));
    }
  }
  if (nonzero == 0) return 0.0;
  double c = std::exp(acc / double(nonzero));
  return c * double(nonzero) / double(count);
}

}  // namespace

ReturnProbTable return_probabilities(const StepLaw& law, std::int64_t horizon,
                                     const GreenOptions& opts) {
  if (horizon < 0) throw std::invalid_argument("return_probabilities: horizon < 0");
  ReturnProbTable table;
  table.law_hash = law.hash();
  table.d = law.dim();
  table.horizon = horizon;

  std::int64_t cap;
  if (law.is_axis_law()) {
    cap = opts.exact_cap > 0 ? opts.exact_cap : kDefaultAxisCap;
  } else {
    // largest horizon whose two box buffers fit the budget
    cap = 0;
    const int r = law.support_radius();
    for (std::int64_t k = 1;; ++k) {
      double cells = 1.0;
      for (int i = 0; i < law.dim(); ++i) cells *= double(2 * r * k + 1);
      if (cells * 2.0 * sizeof(double) > double(opts.memory_budget)) break;
      cap = k;
      if (opts.exact_cap > 0 && cap >= opts.exact_cap) break;
    }
    if (opts.exact_cap > 0) cap = std::min(cap, opts.exact_cap);
    if (cap < 64 && horizon >= 64)
      throw std::runtime_error(
          "return_probabilities: memory budget exceeded before exact horizon "
          "64 (law support too large)");
  }
  table.exact_horizon = std::min(horizon, cap);

  std::vector<double> exact =
      law.is_axis_law()
          ? axis_return_probs(law, table.exact_horizon)
          : box_return_probs(law, table.exact_horizon, opts.memory_budget);

  table.p0.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
  for (std::int64_t k = 0; k <= table.exact_horizon; ++k)
    table.p0[static_cast<std::size_t>(k)] = exact[static_cast<std::size_t>(k)];

  table.fit_c = fit_tail_coefficient(table.p0, table.d, table.exact_horizon);
  for (std::int64_t k = table.exact_horizon + 1; k <= horizon; ++k)
    table.p0[static_cast<std::size_t>(k)] =
        table.fit_c * std::pow(double(k), -0.5 * double(table.d));
  return table;
}

double power_tail_sum(double s, std::int64_t K) {
  if (s <= 1.0) throw std::invalid_argument("power_tail_sum: s must exceed 1");
  if (K < 0) K = 0;
  // sum a block directly, then an Euler-Maclaurin remainder
  const std::int64_t block_end = std::max<std::int64_t>(K + 1, 64);
  double sum = 0.0;
  for (std::int64_t k = K + 1; k < block_end; ++k)
    sum += std::pow(double(k), -s);
  const double a = double(block_end);
  // sum_{k>=a} k^-s = a^{1-s}/(s-1) + a^-s/2 + s a^{-s-1}/12 - ...
  double rem = std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s) +
               s / 12.0 * std::pow(a, -s - 1.0) -
               s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(a, -s - 3.0);
  return sum + rem;
}

GreenZero green_zero(const StepLaw& law, double tol, const GreenOptions& opts) {
  if (law.dim() < 3)
    throw std::invalid_argument("green_zero: series diverges for d <= 2");
  if (!(tol > 0.0)) throw std::invalid_argument("green_zero: tol must be > 0");

  std::int64_t cap = opts.exact_cap > 0
                         ? opts.exact_cap
                         : (law.is_axis_law() ? kDefaultAxisCap : 0);
  GreenOptions o = opts;
  o.exact_cap = cap;
  ReturnProbTable t = return_probabilities(law, cap > 0 ? cap : 64, o);

  const double s = 0.5 * double(law.dim());
  double exact_part = 0.0;
  for (std::int64_t k = 0; k <= t.exact_horizon; ++k)
    exact_part += t.p0[static_cast<std::size_t>(k)];

  // certified horizon: envelope 1.5 c T(K) <= tol
  const double envelope_c = 1.5 * t.fit_c;
  std::int64_t K_cert = t.exact_horizon;
  double env = envelope_c * power_tail_sum(s, K_cert);
  while (env > tol) {
    if (K_cert > (std::int64_t{1} << 52))
      throw std::runtime_error("green_zero: tolerance unachievable");
    K_cert *= 2;
    env = envelope_c * power_tail_sum(s, K_cert);
  }

  GreenZero out;
  out.value = exact_part + t.fit_c * power_tail_sum(s, t.exact_horizon);
  out.error_bound = env;
  out.exact_horizon = t.exact_horizon;
  return out;
}

double expected_ell2(const ReturnProbTable& table, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("expected_ell2: n must be >= 1");
  if (table.horizon < n - 1)
    throw std::invalid_argument("expected_ell2: table horizon too short");
  double acc = 0.0, comp = 0.0;
  for (std::int64_t k = 1; k < n; ++k) {
    double term = double(n - k) * table.p0[static_cast<std::size_t>(k)];
    double y = term - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return double(n) + 2.0 * acc;
}

double expected_ell3(const ReturnProbTable& table, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("expected_ell3: n must be >= 1");
  if (table.horizon < n - 1)
    throw std::invalid_argument("expected_ell3: table horizon too short");
  // ordered triples (i,j,k): all equal -> n; exactly one pair equal ->
  // 6 sum (n-k) p0[k]; all distinct -> 6 sum over gap pairs, via prefix sums.
  double pair_part = 0.0;
  for (std::int64_t k = 1; k < n; ++k)
    pair_part += double(n - k) * table.p0[static_cast<std::size_t>(k)];

  std::vector<double> pref(static_cast<std::size_t>(n), 0.0);   // sum p0[1..x]
  std::vector<double> prefk(static_cast<std::size_t>(n), 0.0);  // sum k p0[k]
  for (std::int64_t k = 1; k < n; ++k) {
    pref[static_cast<std::size_t>(k)] =
        pref[static_cast<std::size_t>(k - 1)] + table.p0[static_cast<std::size_t>(k)];
    prefk[static_cast<std::size_t>(k)] =
        prefk[static_cast<std::size_t>(k - 1)] +
        double(k) * table.p0[static_cast<std::size_t>(k)];
  }
  double triple_part = 0.0;
  for (std::int64_t g1 = 1; g1 <= n - 2; ++g1) {
    std::int64_t gmax = n - 1 - g1;
    triple_part += table.p0[static_cast<std::size_t>(g1)] *
                   (double(n - g1) * pref[static_cast<std::size_t>(gmax)] -
                    prefk[static_cast<std::size_t>(gmax)]);
  }
  return double(n) + 6.0 * pair_part + 6.0 * triple_part;
}

double estimate_K2(const ReturnProbTable& table, std::int64_t n) {
  if (table.d != 2) throw std::invalid_argument("estimate_K2: d must be 2");
  if (n < 16) throw std::invalid_argument("estimate_K2: n must be >= 16");
  if (table.horizon < n)
    throw std::invalid_argument("estimate_K2: table horizon too short");
  double acc = 0.0;
  for (std::int64_t k = 1; k <= n; ++k)
    acc += table.p0[static_cast<std::size_t>(k)];
  return acc / std::log(double(n));
}

double sum_Gn_squared(const ReturnProbTable& table, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("sum_Gn_squared: n must be >= 0");
  if (table.horizon < 2 * n)
    throw std::invalid_argument("sum_Gn_squared: table horizon below 2n");
  double acc = 0.0, comp = 0.0;
  for (std::int64_t m = 0; m <= 2 * n; ++m) {
    double pairs = m <= n ? double(m + 1) : double(2 * n - m + 1);
    double term = pairs * table.p0[static_cast<std::size_t>(m)];
    double y = term - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc;
}

double sum_Gn_squared_direct(const StepLaw& law, std::int64_t n,
                             std::size_t memory_budget) {
  const int d = law.dim();
  const int r = law.support_radius();
  const std::int64_t R = r * n;
  const std::int64_t side = 2 * R + 1;
  double cells = 1.0;
  for (int i = 0; i < d; ++i) cells *= double(side);
  if (cells * 3.0 * sizeof(double) > double(memory_budget))
    throw std::runtime_error("sum_Gn_squared_direct: memory budget exceeded");

  const std::size_t total = static_cast<std::size_t>(cells);
  std::vector<double> cur(total, 0.0), next(total, 0.0), green(total, 0.0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(d));
  stride[0] = 1;
  for (int i = 1; i < d; ++i)
    stride[static_cast<std::size_t>(i)] =
        stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(side);

  std::size_t origin = 0;
  for (int i = 0; i < d; ++i)
    origin += static_cast<std::size_t>(R) * stride[static_cast<std::size_t>(i)];
  cur[origin] = 1.0;
  for (std::size_t i = 0; i < total; ++i) green[i] = cur[i];

  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> probs;
  for (const auto& sp : law.support()) {
    std::ptrdiff_t off = 0;
    for (int i = 0; i < d; ++i)
      off += static_cast<std::ptrdiff_t>(sp.step.c[i]) *
             static_cast<std::ptrdiff_t>(stride[static_cast<std::size_t>(i)]);
    offsets.push_back(off);
    probs.push_back(sp.p);
  }

  for (std::int64_t k = 1; k <= n; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      double mass = cur[idx];
      if (mass == 0.0) continue;
      for (std::size_t s = 0; s < offsets.size(); ++s)
        next[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) +
                                      offsets[s])] += mass * probs[s];
    }
    std::swap(cur, next);
    for (std::size_t i = 0; i < total; ++i) green[i] += cur[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) acc += green[i] * green[i];
  return acc;
}

namespace {
constexpr std::uint32_t kCacheMagic = 0x534C4754;  // "SLGT"
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

void save_table(const ReturnProbTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_table: cannot open " + path);
  auto put = [&](const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
  };
  put(&kCacheMagic, 4);
  put(&kCacheVersion, 4);
  put(&table.law_hash, 8);
  std::int64_t d64 = table.d;
  put(&d64, 8);
  put(&table.horizon, 8);
  put(&table.exact_horizon, 8);
  put(&table.fit_c, 8);
  put(table.p0.data(), table.p0.size() * sizeof(double));
  if (!out) throw std::runtime_error("save_table: write failed for " + path);
}

ReturnProbTable load_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_table: cannot open " + path);
  auto get = [&](void* p, std::size_t len) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("load_table: truncated file " + path);
  };
  std::uint32_t magic = 0, version = 0;
  get(&magic, 4);
  get(&version, 4);
  if (magic != kCacheMagic || version != kCacheVersion)
    throw std::runtime_error("load_table: bad magic/version in " + path);
  ReturnProbTable t;
  get(&t.law_hash, 8);
  std::int64_t d64 = 0;
  get(&d64, 8);
  t.d = static_cast<int>(d64);
  get(&t.horizon, 8);
  get(&t.exact_horizon, 8);
  get(&t.fit_c, 8);
  t.p0.resize(static_cast<std::size_t>(t.horizon) + 1);
  get(t.p0.data(), t.p0.size() * sizeof(double));
  return t;
}

}  // namespace scenerylab::green

#include "scenerylab/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "scenerylab/saddlepoint.hpp"

namespace scenerylab::est {

namespace {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Evaluate fn(state, r) for every replica index; the output vector is laid
// out in replica order no matter how the indices were scheduled.
template <typename T, typename MakeState, typename Fn>
std::vector<T> parallel_map(std::int64_t replicas, int workers,
                            MakeState make_state, Fn fn) {
  std::vector<T> out(static_cast<std::size_t>(replicas));
  workers = std::min<std::int64_t>(resolve_workers(workers), replicas);
  if (workers <= 1) {
    auto state = make_state();
    for (std::int64_t r = 0; r < replicas; ++r)
      out[static_cast<std::size_t>(r)] = fn(state, r);
    return out;
  }
  std::atomic<std::int64_t> cursor{0};
  const std::int64_t chunk = std::max<std::int64_t>(1, replicas / (workers * 64));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      auto state = make_state();
      for (;;) {
        std::int64_t lo = cursor.fetch_add(chunk);
        if (lo >= replicas || failed.load()) return;
        std::int64_t hi = std::min(replicas, lo + chunk);
        try {
          for (std::int64_t r = lo; r < hi; ++r)
            out[static_cast<std::size_t>(r)] = fn(state, r);
        } catch (...) {
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load())
    throw std::runtime_error("parallel replica evaluation failed");
  return out;
}

struct Kahan {
  double acc = 0.0, comp = 0.0;
  void add(double term) {
    double y = term - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
};

struct MeanStderr {
  double mean, stderr_;
};

MeanStderr reduce_mean(const std::vector<double>& values) {
  Kahan s, s2;
  for (double v : values) {
    s.add(v);
    s2.add(v * v);
  }
  double n = double(values.size());
  double mean = s.acc / n;
  double var = std::max(0.0, s2.acc / n - mean * mean);
  return {mean, std::sqrt(var / n)};
}

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, rng::Purpose purpose,
                          std::uint64_t index) {
  return rng::keyed_block(seed, purpose, index, 0x5EEDu, 0)[0];
}

LocalTimeField sample_field(const StepLaw& law, std::int64_t n,
                            rng::RandomStream& stream, SiteCountMap& scratch) {
  scratch.reset(static_cast<std::size_t>(n) + 1);
  Site pos{};
  const int d = law.dim();
  for (std::int64_t k = 0; k < n; ++k) {
    Site step = law.draw_step(stream.next_u64());
    for (int i = 0; i < d; ++i) pos.c[i] += step.c[i];
    scratch.increment(pack_site(pos));
  }
  return LocalTimeField(d, n, scratch.extract_sorted(), true);
}

OriginStats origin_visits(const StepLaw& law, std::int64_t n,
                          rng::RandomStream& stream) {
  OriginStats out;
  out.first_visit = n + 1;
  Site pos{};
  const int d = law.dim();
  for (std::int64_t k = 1; k <= n; ++k) {
    Site step = law.draw_step(stream.next_u64());
    bool zero = true;
    for (int i = 0; i < d; ++i) {
      pos.c[i] += step.c[i];
      zero &= pos.c[i] == 0;
    }
    if (zero) {
      ++out.visits;
      if (out.first_visit > n) out.first_visit = k;
    }
  }
  return out;
}

double ell2_of_walk(const StepLaw& law, std::int64_t n,
                    rng::RandomStream& stream, SiteCountMap& scratch) {
  scratch.reset(static_cast<std::size_t>(n) + 1);
  Site pos{};
  const int d = law.dim();
  std::int64_t ell2 = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    Site step = law.draw_step(stream.next_u64());
    for (int i = 0; i < d; ++i) pos.c[i] += step.c[i];
    std::uint32_t prev = scratch.increment(pack_site(pos));
    ell2 += 2 * std::int64_t(prev) + 1;  // (c+1)^2 - c^2
  }
  return double(ell2);
}

EstimateResult naive_mc(const StepLaw& law, const scenery::SceneryLaw& scen,
                        std::int64_t n, double b, std::int64_t replicas,
                        std::uint64_t seed, int workers, double predicted_p) {
  if (replicas < 1) throw std::invalid_argument("naive_mc: replicas < 1");
  if (predicted_p >= 0.0 && predicted_p < 1e-10 / double(replicas))
    throw std::invalid_argument(
        "naive_mc: predicted probability below 1e-10/replicas; plain Monte "
        "Carlo cannot see this event, use the conditional-IS estimator");
  auto t0 = std::chrono::steady_clock::now();

  auto hits = parallel_map<double>(
      replicas, workers, [&] { return SiteCountMap(); },
      [&](SiteCountMap& scratch, std::int64_t r) {
        rng::RandomStream walk(seed, rng::Purpose::walk,
                               static_cast<std::uint64_t>(r));
        LocalTimeField field = sample_field(law, n, walk, scratch);
        std::uint64_t scenery_seed = derive_seed(seed, rng::Purpose::scenery,
                                                 static_cast<std::uint64_t>(r));
        double x = scenery::rwrs_value(field, scen, scenery_seed);
        return x >= b ? 1.0 : 0.0;
      });

  Kahan s;
  for (double h : hits) s.add(h);
  double p = s.acc / double(replicas);
  EstimateResult out;
  out.p_hat = p;
  out.log_p_hat = std::log(p);
  out.stderr_ = std::sqrt(std::max(0.0, p * (1.0 - p)) / double(replicas));
  out.replicas = replicas;
  out.estimator = "naive";
  out.seed = seed;
  out.wall_seconds = wall_since(t0);
  return out;
}

EstimateResult conditional_mc(const StepLaw& law,
                              const scenery::SceneryLaw& scen, std::int64_t n,
                              double b, std::int64_t walk_replicas,
                              std::int64_t inner_replicas, std::uint64_t seed,
                              int workers) {
  if (walk_replicas < 1)
    throw std::invalid_argument("conditional_mc: walk_replicas < 1");
  const bool exact_inner = scen.kind() == scenery::Kind::gaussian;
  auto t0 = std::chrono::steady_clock::now();

  struct Inner {
    double value;
    bool failed;
  };
  auto inner = parallel_map<Inner>(
      walk_replicas, workers, [&] { return SiteCountMap(); },
      [&](SiteCountMap& scratch, std::int64_t r) -> Inner {
        rng::RandomStream walk(seed, rng::Purpose::walk,
                               static_cast<std::uint64_t>(r));
        LocalTimeField field = sample_field(law, n, walk, scratch);
        if (exact_inner)
          return {sp::conditional_gaussian_tail(field, scen.variance(), b),
                  false};
        rng::RandomStream tilt(seed, rng::Purpose::tilt,
                               static_cast<std::uint64_t>(r));
        try {
          sp::IsEstimate e =
              sp::tilted_is_estimate(field, scen, b, inner_replicas, tilt);
          return {e.p_hat, false};
        } catch (const sp::TiltUnreachable&) {
          return {0.0, true};
        }
      });

  std::vector<double> values(inner.size());
  std::int64_t failures = 0;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    values[i] = inner[i].value;
    failures += inner[i].failed ? 1 : 0;
  }
  MeanStderr ms = reduce_mean(values);
  EstimateResult out;
  out.p_hat = ms.mean;
  out.log_p_hat = std::log(ms.mean);
  out.stderr_ = ms.stderr_;
  out.replicas = walk_replicas;
  out.estimator = exact_inner ? "conditional-exact" : "conditional-IS";
  out.seed = seed;
  out.wall_seconds = wall_since(t0);
  if (failures > 0) {
    out.flags = "inner-failures=" + std::to_string(failures);
    if (double(failures) > 0.01 * double(walk_replicas))
      out.flags += ";unreliable";
  }
  return out;
}

RateFit empirical_rate(const std::vector<RatePoint>& points, RateModel model) {
  if (points.size() < 2)
    throw std::invalid_argument("empirical_rate: need at least two points");
  std::vector<double> x(points.size()), y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    switch (model) {
      case RateModel::T2: x[i] = p.b * p.b / p.n; break;
      case RateModel::T3a: x[i] = p.b * p.b / (p.n * std::log(p.n)); break;
      case RateModel::T3b: x[i] = p.b / std::sqrt(p.n); break;
    }
    y[i] = p.log_p;
  }
  double n = double(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("empirical_rate: degenerate x");
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, ybar = sy / n;
  fit.residuals.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double e = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals[i] = e;
    ss_res += e * e;
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  if (points.size() > 2)
    fit.slope_stderr = std::sqrt(ss_res / (n - 2.0) / (sxx - sx * sx / n));
  return fit;
}

std::vector<ConcentrationRow> concentration_rows(
    const std::vector<double>& ell2_samples, double expected_ell2,
    std::int64_t n, const std::vector<double>& x_grid) {
  const double replicas = double(ell2_samples.size());
  const double logn = std::log(double(n));
  std::vector<ConcentrationRow> rows;
  for (double x : x_grid) {
    std::int64_t up = 0, down = 0;
    for (double v : ell2_samples) {
      double dev = v - expected_ell2;
      if (dev >= x) ++up;
      if (-dev >= x) ++down;
    }
    ConcentrationRow row;
    row.x = x;
    row.p_up = double(up) / replicas;
    row.p_down = double(down) / replicas;
    double two = double(up + down);
    if (x <= 0.0) two = replicas;  // |dev| >= 0 always
    row.p_two = std::min(1.0, two / replicas);
    row.stderr_two =
        std::sqrt(std::max(0.0, row.p_two * (1.0 - row.p_two)) / replicas);
    row.diag_d3 = std::pow(x, 2.0 / 3.0) / std::cbrt(double(n));
    row.diag_d4 = std::sqrt(x) / std::pow(logn, 1.5);
    row.diag_dgt4 = std::sqrt(x) / logn;
    rows.push_back(row);
  }
  return rows;
}

ConcentrationTable ell2_concentration(const StepLaw& law, std::int64_t n,
                                      const std::vector<double>& x_grid,
                                      std::int64_t replicas, std::uint64_t seed,
                                      const green::ReturnProbTable& table,
                                      int workers) {
  ConcentrationTable out;
  out.expected_ell2 = green::expected_ell2(table, n);
  out.ell2_samples = parallel_map<double>(
      replicas, workers, [&] { return SiteCountMap(); },
      [&](SiteCountMap& scratch, std::int64_t r) {
        rng::RandomStream walk(seed, rng::Purpose::walk,
                               static_cast<std::uint64_t>(r));
        return ell2_of_walk(law, n, walk, scratch);
      });
  out.rows = concentration_rows(out.ell2_samples, out.expected_ell2, n, x_grid);
  return out;
}

MaxTailTable max_local_time_tail(const StepLaw& law, std::int64_t n,
                                 const std::vector<std::int64_t>& k_grid,
                                 std::int64_t replicas, std::uint64_t seed,
                                 int workers) {
  auto visits = parallel_map<std::int64_t>(
      replicas, workers, [] { return 0; },
      [&](int&, std::int64_t r) {
        rng::RandomStream walk(seed, rng::Purpose::walk,
                               static_cast<std::uint64_t>(r));
        return origin_visits(law, n, walk).visits;
      });

  // q-hat comes from its own replica block (stream indices offset past the
  // grid block) so the k = 1 row and the hitting estimate are two distinct
  // estimates of the same event.
  const std::int64_t q_replicas =
      std::max<std::int64_t>(replicas / 10, std::min<std::int64_t>(replicas, 10000));
  auto first_visits = parallel_map<std::int64_t>(
      q_replicas, workers, [] { return 0; },
      [&](int&, std::int64_t r) {
        rng::RandomStream walk(seed, rng::Purpose::walk,
                               static_cast<std::uint64_t>(replicas + r));
        return origin_visits(law, n, walk).first_visit;
      });

  MaxTailTable out;
  std::int64_t returned = 0;
  for (auto t : first_visits) returned += t <= n ? 1 : 0;
  out.q_hat = double(returned) / double(q_replicas);
  out.q_stderr =
      std::sqrt(std::max(0.0, out.q_hat * (1.0 - out.q_hat)) / double(q_replicas));

  std::vector<double> xs, ys;
  for (std::int64_t k : k_grid) {
    std::int64_t hits = 0;
    for (auto v : visits) hits += v >= k ? 1 : 0;
    MaxTailRow row;
    row.k = k;
    row.p_hat = double(hits) / double(replicas);
    row.stderr_ = std::sqrt(std::max(0.0, row.p_hat * (1.0 - row.p_hat)) /
                            double(replicas));
    row.geometric_bound = std::pow(out.q_hat, double(k));
    out.rows.push_back(row);
    if (hits >= 30) {  // usable for the log-linear fit
      xs.push_back(double(k));
      ys.push_back(std::log(row.p_hat));
    }
  }
  out.slope = 0.0;
  out.slope_vs_log_q = 0.0;
  if (xs.size() >= 2) {
    double n_ = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    out.slope = (n_ * sxy - sx * sy) / (n_ * sxx - sx * sx);
    out.slope_vs_log_q = out.slope / std::log(out.q_hat);
  }
  return out;
}

}  // namespace scenerylab::est

#include "scenerylab/saddlepoint.hpp"

#include <algorithm>
#include <cmath>

#include "scenerylab/rates.hpp"

namespace scenerylab::sp {

namespace {

struct Kahan {
  double acc = 0.0, comp = 0.0;
  void add(double term) {
    double y = term - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
};

double sum_log_mgf(const LocalTimeField& field, const scenery::SceneryLaw& law,
                   double h) {
  Kahan s;
  for (const auto& [key, count] : field.entries()) {
    (void)key;
    s.add(law.log_mgf(double(count) * h));
  }
  return s.acc;
}

}  // namespace

TiltState tilt_state(const LocalTimeField& field,
                     const scenery::SceneryLaw& law, double h) {
  if (h < 0.0) throw std::invalid_argument("tilt_state: h must be >= 0");
  double theta = law.theta();
  if (!(double(field.ell_inf()) * h < theta))
    throw std::domain_error("tilt_state: h ell_inf outside the mgf domain");

  Kahan m, v, g;
  for (const auto& [key, count] : field.entries()) {
    (void)key;
    double ell = double(count);
    double w = ell * h;
    m.add(ell * law.tilted_mean(w));
    v.add(ell * ell * law.tilted_variance(w));
    g.add(ell * ell * ell * law.tilted_third_abs_central(w));
  }
  TiltState out;
  out.h = h;
  out.M = m.acc;
  out.V2 = v.acc;
  out.G3 = g.acc;
  return out;
}

TiltState solve_tilt(const LocalTimeField& field,
                     const scenery::SceneryLaw& law, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("solve_tilt: b must be > 0");
  const double tol = 1e-9 * b;
  const double theta = law.theta();

  if (law.bounded()) {
    double sup = double(field.steps()) * law.support_max();
    if (b >= sup)
      throw TiltUnreachable("solve_tilt: target at or above the support maximum");
  }

  double hi_limit = std::isinf(theta)
                        ? std::numeric_limits<double>::infinity()
                        : 0.5 * theta / double(field.ell_inf());

  double h = b / (law.variance() * field.ell2_d());  // first-order guess
  if (std::isfinite(hi_limit)) h = std::min(h, hi_limit);

  double lo = 0.0, hi = hi_limit;
  if (std::isfinite(hi)) {
    TiltState edge = tilt_state(field, law, hi);
    if (edge.M < b)
      throw TiltUnreachable(
          "solve_tilt: target unreachable within h ell_inf <= theta/2");
  }

  TiltState st;
  for (int it = 1; it <= 100; ++it) {
    st = tilt_state(field, law, h);
    st.iterations = it;
    if (std::fabs(st.M - b) <= tol) return st;
    if (st.M < b) lo = h;
    else hi = std::isfinite(hi) ? std::min(hi, h) : h;

    double step = (b - st.M) / st.V2;  // Newton: dM/dh = V2 > 0
    double next = h + step;
    bool inside = next > lo && (!std::isfinite(hi) || next < hi);
    if (!inside) {
      if (!std::isfinite(hi)) {
        next = std::max(2.0 * h, 1e-300);  // grow the bracket upward
      } else {
        next = 0.5 * (lo + hi);
      }
    }
    h = next;
  }
  throw TiltUnreachable("solve_tilt: no convergence in 100 iterations");
}

SaddlepointTail saddlepoint_tail(const LocalTimeField& field,
                                 const scenery::SceneryLaw& law, double b,
                                 double esseen_constant) {
  SaddlepointTail out;
  double v0 = law.variance() * field.ell2_d();
  out.leading = std::sqrt(v0) / (std::sqrt(2.0 * 3.14159265358979323846) * b) *
                std::exp(-b * b / (2.0 * v0));

  out.tilt = solve_tilt(field, law, b);
  const double h = out.tilt.h;
  double exponent = -h * b + sum_log_mgf(field, law, h) +
                    0.5 * h * h * out.tilt.V2;
  out.refined = std::exp(exponent) *
                rates::mills_tail(h * std::sqrt(out.tilt.V2));
  out.esseen_bound =
      esseen_constant * out.tilt.G3 / std::pow(out.tilt.V2, 1.5);
  return out;
}

IsEstimate tilted_is_estimate(const LocalTimeField& field,
                              const scenery::SceneryLaw& law, double b,
                              std::int64_t replicas,
                              rng::RandomStream& stream) {
  if (replicas < 100)
    throw std::invalid_argument("tilted_is_estimate: need at least 100 replicas");
  IsEstimate out;
  out.replicas = replicas;

  if (law.bounded() &&
      b > double(field.steps()) * law.support_max()) {
    // P{X >= b} = 0 exactly; nothing to sample.
    out.degenerate_zero = true;
    out.p_hat = 0.0;
    out.stderr_ = 0.0;
    out.log_p_hat = -std::numeric_limits<double>::infinity();
    out.effective_sample_size = double(replicas);
    return out;
  }

  double h = 0.0;
  double log_norm = 0.0;  // sum_z log f(ell_z h)
  if (b > 0.0) {
    TiltState st = solve_tilt(field, law, b);
    h = st.h;
    log_norm = sum_log_mgf(field, law, h);
  }
  // b <= 0: zero tilt; the weight is the plain indicator.

  Kahan sum, sum_sq, wsum, wsum_sq;
  for (std::int64_t r = 0; r < replicas; ++r) {
    Kahan t;
    for (const auto& [key, count] : field.entries()) {
      (void)key;
      double ell = double(count);
      t.add(ell * law.tilted_sample(ell * h, stream));
    }
    double weight = std::exp(log_norm - h * t.acc);
    double value = t.acc >= b ? weight : 0.0;
    sum.add(value);
    sum_sq.add(value * value);
    wsum.add(weight);
    wsum_sq.add(weight * weight);
  }
  double m = sum.acc / double(replicas);
  double var = std::max(0.0, sum_sq.acc / double(replicas) - m * m);
  out.p_hat = m;
  out.stderr_ = std::sqrt(var / double(replicas));
  out.log_p_hat = std::log(m);
  out.effective_sample_size =
      wsum_sq.acc > 0.0 ? wsum.acc * wsum.acc / wsum_sq.acc : 0.0;
  out.reliable = out.effective_sample_size >= 10.0;
  return out;
}

double conditional_gaussian_tail(const LocalTimeField& field, double sigma2,
                                 double b) {
  return rates::mills_tail(b / std::sqrt(sigma2 * field.ell2_d()));
}

double lyapunov_ratio(const LocalTimeField& field,
                      const scenery::SceneryLaw& law) {
  double v = std::sqrt(law.variance() * field.ell2_d());
  return law.third_abs_moment() * field.ell3_d() / (v * v * v);
}

FieldDiagnostics field_diagnostics(const LocalTimeField& field,
                                   const scenery::SceneryLaw& law, double A) {
  FieldDiagnostics out;
  double n = double(field.steps());
  double logn = std::log(std::max(2.0, n));
  out.triple_sum = field.ell3_d();
  out.V2 = law.variance() * field.ell2_d();
  out.triple_within_nlog2n = out.triple_sum <= n * logn * logn;
  if (A <= 0.0) A = 2.0 * law.variance();  // loose default when no G0 given
  out.v2_within_An = out.V2 <= A * n;
  out.lyapunov = lyapunov_ratio(field, law);
  return out;
}

}  // namespace scenerylab::sp

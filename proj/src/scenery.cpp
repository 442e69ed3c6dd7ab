#include "scenerylab/scenery.hpp"

#include <cmath>
#include <stdexcept>

#include "scenerylab/quadrature.hpp"

namespace scenerylab::scenery {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoOverSqrtTwoPi = 0.79788456080286535588;  // E|N(0,1)|

// d^k/ds^k [sinh(s)/s]; series below |s| = 0.25, where the closed forms
// start losing digits to cancellation. Truncation error < 1e-13 at the
// switch point in every branch.
double sinhc0(double s) {
  double s2 = s * s;
  if (std::fabs(s) < 0.25)
    return 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
  return std::sinh(s) / s;
}

double sinhc1(double s) {
  double s2 = s * s;
  if (std::fabs(s) < 0.25)
    return s * (1.0 / 3.0 + s2 / 30.0 + s2 * s2 / 840.0 +
                s2 * s2 * s2 / 45360.0);
  return (s * std::cosh(s) - std::sinh(s)) / s2;
}

double sinhc2(double s) {
  double s2 = s * s;
  if (std::fabs(s) < 0.25)
    return 1.0 / 3.0 + s2 / 10.0 + s2 * s2 / 168.0 + s2 * s2 * s2 / 6480.0;
  return ((s2 + 2.0) * std::sinh(s) - 2.0 * s * std::cosh(s)) / (s2 * s);
}

double sinhc3(double s) {
  double s2 = s * s;
  if (std::fabs(s) < 0.25)
    return s * (1.0 / 5.0 + s2 / 42.0 + s2 * s2 / 1080.0 +
                s2 * s2 * s2 / 55440.0);
  return ((s2 + 6.0) * s * std::cosh(s) - (3.0 * s2 + 6.0) * std::sinh(s)) /
         (s2 * s2);
}

// Langevin function coth(s) - 1/s.
double langevin(double s) {
  if (std::fabs(s) < 0.25) {
    double s2 = s * s;
    return s * (1.0 / 3.0 - s2 / 45.0 + 2.0 * s2 * s2 / 945.0 -
                s2 * s2 * s2 / 4725.0);
  }
  return 1.0 / std::tanh(s) - 1.0 / s;
}

// 1/s^2 - 1/sinh(s)^2.
double langevin_deriv(double s) {
  if (std::fabs(s) < 0.25) {
    double s2 = s * s;
    return 1.0 / 3.0 - s2 / 15.0 + 2.0 * s2 * s2 / 189.0 -
           s2 * s2 * s2 / 675.0 + 2.0 * s2 * s2 * s2 * s2 / 10395.0;
  }
  double sh = std::sinh(s);
  return 1.0 / (s * s) - 1.0 / (sh * sh);
}

// int_a^inf t^3 e^{-r t} dt
double cubic_exp_upper(double a, double r) {
  double inv = 1.0 / r;
  return std::exp(-r * a) *
         (((a * inv + 3.0 * inv * inv) * a + 6.0 * inv * inv * inv) * a +
          6.0 * inv * inv * inv * inv);
}

// int_0^a t^3 e^{r t} dt, series for small |ra|
double cubic_exp_lower(double a, double r) {
  double ra = r * a;
  if (std::fabs(ra) < 0.5) {
    double sum = 0.0, term = 1.0;  // term = (ra)^j / j!
    for (int j = 0; j < 16; ++j) {
      sum += term / double(j + 4);
      term *= ra / double(j + 1);
    }
    return a * a * a * a * sum;
  }
  double inv = 1.0 / r;
  double poly = ((a * inv - 3.0 * inv * inv) * a + 6.0 * inv * inv * inv) * a -
                6.0 * inv * inv * inv * inv;
  return std::exp(ra) * poly + 6.0 * inv * inv * inv * inv;
}

}  // namespace

SceneryLaw::SceneryLaw(Kind k, double param, std::string name)
    : kind_(k), param_(param), name_(std::move(name)) {}

SceneryLaw SceneryLaw::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian scenery: sigma <= 0");
  return SceneryLaw(Kind::gaussian, sigma, "gaussian");
}

SceneryLaw SceneryLaw::rademacher() {
  return SceneryLaw(Kind::rademacher, 1.0, "rademacher");
}

SceneryLaw SceneryLaw::two_sided_exponential(double rate) {
  if (!(rate > 0.0))
    throw std::invalid_argument("two-sided exponential scenery: rate <= 0");
  return SceneryLaw(Kind::two_sided_exponential, rate, "laplace");
}

SceneryLaw SceneryLaw::centered_uniform(double halfwidth) {
  if (!(halfwidth > 0.0))
    throw std::invalid_argument("centered uniform scenery: halfwidth <= 0");
  return SceneryLaw(Kind::centered_uniform, halfwidth, "uniform");
}

SceneryLaw SceneryLaw::by_name(const std::string& name, double param) {
  if (name == "gaussian") return gaussian(param);
  if (name == "rademacher") return rademacher();
  if (name == "laplace") return two_sided_exponential(param);
  if (name == "uniform") return centered_uniform(param);
  throw std::invalid_argument("unknown scenery law: " + name);
}

double SceneryLaw::variance() const {
  switch (kind_) {
    case Kind::gaussian: return param_ * param_;
    case Kind::rademacher: return 1.0;
    case Kind::two_sided_exponential: return 2.0 / (param_ * param_);
    case Kind::centered_uniform: return param_ * param_ / 3.0;
  }
  return 0.0;
}

double SceneryLaw::third_abs_moment() const {
  switch (kind_) {
    case Kind::gaussian:
      return param_ * param_ * param_ * 2.0 * kTwoOverSqrtTwoPi;
    case Kind::rademacher: return 1.0;
    case Kind::two_sided_exponential:
      return 6.0 / (param_ * param_ * param_);
    case Kind::centered_uniform: return param_ * param_ * param_ / 4.0;
  }
  return 0.0;
}

double SceneryLaw::theta() const {
  return kind_ == Kind::two_sided_exponential ? param_ : kInf;
}

double SceneryLaw::log_mgf(double h) const {
  switch (kind_) {
    case Kind::gaussian: {
      double s = param_ * h;
      return 0.5 * s * s;
    }
    case Kind::rademacher: {
      double a = std::fabs(h);
      return a + std::log1p(std::exp(-2.0 * a)) - 0.6931471805599453094;
    }
    case Kind::two_sided_exponential: {
      double x = h / param_;
      if (std::fabs(x) >= 1.0)
        throw std::domain_error("log_mgf: tilt outside the mgf domain");
      return -std::log1p(-x * x);
    }
    case Kind::centered_uniform: {
      double s = param_ * h;
      if (std::fabs(s) < 0.5) return std::log(sinhc0(s));
      double a = std::fabs(s);
      return a - std::log(2.0 * a) + std::log1p(-std::exp(-2.0 * a));
    }
  }
  return 0.0;
}

double SceneryLaw::mgf(double h) const { return std::exp(log_mgf(h)); }

double SceneryLaw::mgf_d1(double h) const {
  switch (kind_) {
    case Kind::gaussian: return param_ * param_ * h * mgf(h);
    case Kind::rademacher: return std::sinh(h);
    case Kind::two_sided_exponential: {
      double D2 = param_ * param_, q = D2 - h * h;
      return 2.0 * h * D2 / (q * q);
    }
    case Kind::centered_uniform: return param_ * sinhc1(param_ * h);
  }
  return 0.0;
}

double SceneryLaw::mgf_d2(double h) const {
  switch (kind_) {
    case Kind::gaussian: {
      double s2 = param_ * param_;
      return (s2 + s2 * s2 * h * h) * mgf(h);
    }
    case Kind::rademacher: return std::cosh(h);
    case Kind::two_sided_exponential: {
      double D2 = param_ * param_, q = D2 - h * h;
      return 2.0 * D2 * (D2 + 3.0 * h * h) / (q * q * q);
    }
    case Kind::centered_uniform:
      return param_ * param_ * sinhc2(param_ * h);
  }
  return 0.0;
}

double SceneryLaw::mgf_d3(double h) const {
  switch (kind_) {
    case Kind::gaussian: {
      double s2 = param_ * param_;
      return (3.0 * s2 * s2 * h + s2 * s2 * s2 * h * h * h) * mgf(h);
    }
    case Kind::rademacher: return std::sinh(h);
    case Kind::two_sided_exponential: {
      double D2 = param_ * param_, q = D2 - h * h;
      return 24.0 * D2 * h * (D2 + h * h) / (q * q * q * q);
    }
    case Kind::centered_uniform: {
      double b = param_;
      return b * b * b * sinhc3(b * h);
    }
  }
  return 0.0;
}

double SceneryLaw::tilted_mean(double w) const {
  switch (kind_) {
    case Kind::gaussian: return param_ * param_ * w;
    case Kind::rademacher: return std::tanh(w);
    case Kind::two_sided_exponential: {
      double q = param_ * param_ - w * w;
      if (q <= 0.0) throw std::domain_error("tilted_mean: weight outside domain");
      return 2.0 * w / q;
    }
    case Kind::centered_uniform: return param_ * langevin(param_ * w);
  }
  return 0.0;
}

double SceneryLaw::tilted_variance(double w) const {
  switch (kind_) {
    case Kind::gaussian: return param_ * param_;
    case Kind::rademacher: {
      double t = std::tanh(w);
      return 1.0 - t * t;
    }
    case Kind::two_sided_exponential: {
      double D2 = param_ * param_, q = D2 - w * w;
      if (q <= 0.0)
        throw std::domain_error("tilted_variance: weight outside domain");
      return 2.0 * (D2 + w * w) / (q * q);
    }
    case Kind::centered_uniform:
      return param_ * param_ * langevin_deriv(param_ * w);
  }
  return 0.0;
}

double SceneryLaw::tilted_third_abs_central(double w) const {
  switch (kind_) {
    case Kind::gaussian:
      return param_ * param_ * param_ * 2.0 * kTwoOverSqrtTwoPi;
    case Kind::rademacher: {
      double m = std::tanh(w);
      double m2 = m * m;
      return (1.0 - m2) * (1.0 + m2);
    }
    case Kind::two_sided_exponential: {
      double D = param_;
      double a = std::fabs(w);
      if (a >= D)
        throw std::domain_error("tilted moment: weight outside domain");
      double rp = D - a, rn = D + a;
      double C = rp * rn / (2.0 * D);
      double mu = 2.0 * a / (rp * rn);
      double i_neg = C * std::exp(rn * mu) * cubic_exp_upper(mu, rn);
      double i_mid = C * std::exp(-rp * mu) * cubic_exp_lower(mu, rp);
      double i_pos = C * std::exp(-rp * mu) * 6.0 / (rp * rp * rp * rp);
      return i_neg + i_mid + i_pos;
    }
    case Kind::centered_uniform: {
      double b = param_;
      double lf = log_mgf(w);
      double mu = tilted_mean(w);
      auto dens = [&](double y) {
        return std::exp(w * y - lf) / (2.0 * b);
      };
      auto f = [&](double y) {
        double t = std::fabs(y - mu);
        return t * t * t * dens(y);
      };
      return integrate(f, -b, mu, 1e-13) + integrate(f, mu, b, 1e-13);
    }
  }
  return 0.0;
}

bool SceneryLaw::bounded() const {
  return kind_ == Kind::rademacher || kind_ == Kind::centered_uniform;
}

double SceneryLaw::support_max() const {
  switch (kind_) {
    case Kind::rademacher: return 1.0;
    case Kind::centered_uniform: return param_;
    default: return kInf;
  }
}

double SceneryLaw::from_words(std::uint64_t w0, std::uint64_t w1) const {
  switch (kind_) {
    case Kind::gaussian: {
      double u1 = rng::to_unit_open(w0);
      double u2 = rng::to_unit(w1);
      double r = std::sqrt(-2.0 * std::log(u1));
      return param_ * r * std::cos(6.283185307179586476925286766559 * u2);
    }
    case Kind::rademacher:
      return (w0 >> 63) ? 1.0 : -1.0;
    case Kind::two_sided_exponential: {
      double mag = -std::log(rng::to_unit_open(w0)) / param_;
      return (w1 >> 63) ? mag : -mag;
    }
    case Kind::centered_uniform:
      return param_ * (2.0 * rng::to_unit(w0) - 1.0);
  }
  return 0.0;
}

double SceneryLaw::sample(rng::RandomStream& stream) const {
  std::uint64_t w0 = stream.next_u64();
  std::uint64_t w1 = stream.next_u64();
  return from_words(w0, w1);
}

double SceneryLaw::tilted_sample(double w, rng::RandomStream& stream) const {
  if (!(std::fabs(w) < theta()))
    throw std::domain_error("tilted_sample: weight outside the mgf domain");
  switch (kind_) {
    case Kind::gaussian:
      return param_ * param_ * w + param_ * stream.next_gaussian();
    case Kind::rademacher: {
      double p_plus = 1.0 / (1.0 + std::exp(-2.0 * w));
      return stream.next_unit() < p_plus ? 1.0 : -1.0;
    }
    case Kind::two_sided_exponential: {
      double D = param_;
      double p_plus = (D + w) / (2.0 * D);
      double u = stream.next_unit();
      double e = -std::log(stream.next_unit_open());
      return u < p_plus ? e / (D - w) : -e / (D + w);
    }
    case Kind::centered_uniform: {
      double b = param_, s = w * b;
      double u = stream.next_unit();
      if (std::fabs(s) < 1e-8) return b * (2.0 * u - 1.0);
      if (s > 0.0)
        return b + std::log(u + (1.0 - u) * std::exp(-2.0 * s)) / w;
      return -b + std::log1p(u * std::expm1(2.0 * s)) / w;
    }
  }
  return 0.0;
}

double sample_site(const SceneryLaw& law, const Site& site, std::uint64_t seed) {
  SiteKey k = pack_site(site);
  std::uint64_t c0 = k[0] | (std::uint64_t(k[1]) << 32);
  std::uint64_t c1 = k[2] | (std::uint64_t(k[3]) << 32);
  std::uint64_t c2 = k[4];
  rng::Block b = rng::keyed_block(seed, rng::Purpose::scenery, c0, c1, c2);
  return law.from_words(b[0], b[1]);
}

double rwrs_value(const LocalTimeField& field, const SceneryLaw& law,
                  std::uint64_t seed) {
  return scenery::rwrs_value_with(field, [&](const Site& s) {
    return sample_site(law, s, seed);
  });
}

}  // namespace scenerylab::scenery

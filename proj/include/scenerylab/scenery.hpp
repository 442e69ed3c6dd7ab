// Centred scenery laws under Cramér's condition: moment-generating
// function and derivatives in closed form, lazy site-keyed sampling, the
// accumulated field value X_n, and exact tilted sampling.

#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "scenerylab/lattice.hpp"
#include "scenerylab/local_time.hpp"
#include "scenerylab/rng.hpp"

namespace scenerylab::scenery {

enum class Kind { gaussian, rademacher, two_sided_exponential, centered_uniform };

class SceneryLaw {
 public:
  static SceneryLaw gaussian(double sigma);
  static SceneryLaw rademacher();
  static SceneryLaw two_sided_exponential(double rate);
  static SceneryLaw centered_uniform(double halfwidth);
  static SceneryLaw by_name(const std::string& name, double param);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double param() const { return param_; }

  double variance() const;          // sigma^2
  double third_abs_moment() const;  // gamma = E|xi|^3
  double theta() const;             // sup of the mgf domain (inf if entire)

  // f(h) = E e^{h xi} and derivatives; h strictly inside the domain.
  double mgf(double h) const;
  double mgf_d1(double h) const;
  double mgf_d2(double h) const;
  double mgf_d3(double h) const;
  double log_mgf(double h) const;

  // Tilted law at weight w (density e^{wy} against the base law):
  double tilted_mean(double w) const;      // f'/f
  double tilted_variance(double w) const;  // (log f)''
  double tilted_third_abs_central(double w) const;

  bool bounded() const;
  double support_max() const;  // +inf when unbounded

  // base draw from a sequential stream
  double sample(rng::RandomStream& stream) const;
  // exact draw from the tilted law; |w| < theta required
  double tilted_sample(double w, rng::RandomStream& stream) const;

 private:
  SceneryLaw(Kind k, double param, std::string name);

  double from_words(std::uint64_t w0, std::uint64_t w1) const;

  friend double sample_site(const SceneryLaw&, const Site&, std::uint64_t);

  Kind kind_;
  double param_;  // sigma | unused | rate D | halfwidth
  std::string name_;
};

// Deterministic function of (law, site, seed); distinct sites use
// independent counter-based streams, so no scenery map is ever stored.
double sample_site(const SceneryLaw& law, const Site& site, std::uint64_t seed);

// X_n = sum_z ell_n(z) xi(z), summed in packed-key-sorted site order with
// compensated addition.
double rwrs_value(const LocalTimeField& field, const SceneryLaw& law,
                  std::uint64_t seed);

// Same contraction against an arbitrary site function (testing hook).
template <typename F>
double rwrs_value_with(const LocalTimeField& field, const F& xi) {
  double acc = 0.0, comp = 0.0;
  for (const auto& [key, count] : field.entries()) {
    double term = static_cast<double>(count) * xi(unpack_site(key));
    double y = term - comp;
    double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc;
}

}  // namespace scenerylab::scenery

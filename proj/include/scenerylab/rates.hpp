// Closed-form evaluators for the moderate- and large-deviation rates, a
// regime classifier, and a high-accuracy normal tail.

#pragma once

#include <cstdint>
#include <string>

namespace scenerylab::rates {

// 1 - Phi(x), relative error < 1e-12 for |x| <= 38.
double mills_tail(double x);

// d >= 4 refined asymptotics: P{X_n >= b} ~ 1 - Phi(b / sqrt(sigma^2 n (2G0-1))).
double rate_T1(double n, double b, double sigma2, double G0);

// d >= 3 moderate deviations: log P ~ -b^2 / (2 sigma^2 (2G0-1) n).
double rate_T2(double n, double b, double sigma2, double G0);

// d = 2 regime (a): log P ~ -(b^2/(n log n)) pi sqrt(det Gamma) / (2 sigma^2).
double rate_T3a(double n, double b, double sigma2, double det_gamma);

// d = 2 regime (b): log P ~ -(b/sqrt n) (det Gamma)^{1/4} / (kappa^2 sigma).
double rate_T3b(double n, double b, double sigma2, double det_gamma,
                double kappa);

// d = 2 regime (c): I(a), piecewise with the crossover at
// a* = sigma / (pi kappa^2 (det Gamma)^{1/4}).
double rate_T3c(double a, double sigma2, double det_gamma, double kappa);
double rate_T3c_crossover(double sigma2, double det_gamma, double kappa);

// d = 2 exponential-tailed scenery: log P ~ -(b/log n)^{1/2} (8 K2 D/(2-beta))^{1/2}.
double rate_special(double n, double b, double D, double beta, double K2);

// Self-intersection moderate deviation reference rate: -lambda sqrt(det Gamma)/(2 kappa^4).
double rate_bcr(double lambda, double det_gamma, double kappa);

enum class RegimeTag {
  T1,
  T2,
  T3a,
  T3b,
  T3c,
  special,
  clt,          // below the deviation scale
  outside,      // above every covered regime
  ambiguous,    // too close to a boundary to call
};

struct RegimeResult {
  RegimeTag tag;
  std::string note;
};

const char* regime_name(RegimeTag tag);

// Classify which result covers (d, n, b). Boundaries are reported as
// ambiguous rather than guessed; the margin is the multiplicative gap
// required from every boundary.
RegimeResult classify_regime(int d, double n, double b, double margin = 2.0);

}  // namespace scenerylab::rates

#pragma once

#include <utility>
#include <vector>

#include "coxplain/survival.hpp"

namespace coxplain {

// Confidence setup for the distribution-band machinery. gamma = 1 is the
// "no bounds" mode: the band halfwidth is forced to zero without evaluating
// any quantile.
struct KsConfig {
  double gamma = 1.0;        // band miss probability, in (0, 1]
  int n_effective = 1;       // sample size entering the halfwidth formula
  double epsilon = kDefaultEpsilon;
};

// Per-neighbor interval bounds on the log-CHF offsets theta_j, together with
// the two collapsed constants the optimizer consumes: the largest upper
// bound (q_upper) and the smallest lower bound (r_lower).
struct ThetaBand {
  std::vector<double> lower;
  std::vector<double> upper;
  double q_upper = 0.0;
  double r_lower = 0.0;
};

// (1-gamma)-style quantile of the Kolmogorov distribution: the k solving
// Q(k) = p with Q(x) = 1 - 2 sum_{i>=1} (-1)^{i-1} exp(-2 i^2 x^2),
// found by bisection to |Q(k) - p| <= 1e-10.
double ks_quantile(double p);

// Critical band halfwidth d_{n,1-gamma}. Uses k/sqrt(n) for n > 10 and the
// small-sample denominator sqrt(n) + 0.12 + 0.11/sqrt(n) otherwise.
double ks_band_halfwidth(int n, double gamma);

// Elementwise band around a CDF-like sequence: (max(f-d,0), min(f+d,1)).
std::pair<std::vector<double>, std::vector<double>> cdf_bounds(
    const std::vector<double>& f, double halfwidth);

// Halfwidth mapped from normalized CDF space back to hazard units:
// delta = (H_max - epsilon) * d.
double chf_delta(const ChfCurve& chf, double halfwidth, double epsilon);

// Interval bounds on theta_j = ln H_j(x_k) - ln H_0j widened by delta:
//   lower_j = ln(max(H_j - delta, epsilon)) - ln H_0j
//   upper_j = ln(min(H_j + delta, H_max))   - ln H_0j
// plus the collapsed constants q_upper = max_j upper_j and
// r_lower = min_j lower_j. With delta = 0 both lists coincide with the
// precise offsets. Throws on grid mismatch.
ThetaBand theta_band(const ChfCurve& chf_k, const ChfCurve& baseline,
                     double delta, double epsilon);

}  // namespace coxplain

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coxplain/survival.hpp"

namespace coxplain {

// Weibull-baseline proportional-hazards generator: inverse-CDF survival
// times with independent Bernoulli censoring labels and a hard truncation.
struct WeibullCoxGen {
  double scale = 1e-5;     // Weibull scale
  double shape = 2.0;      // Weibull shape
  std::vector<double> coefficients;  // true covariate effects
  double truncation = 2000.0;
  double censor_prob = 0.1;  // P(event observed) = 1 - censor_prob
  std::uint64_t seed = 0;
};

// T = (-ln(u) / (scale * exp(x.b)))^(1/shape), truncated.
double gen_survival_time(std::span<const double> x, const WeibullCoxGen& gen,
                         double u);

// Covariates uniform in the ball of sphere_radius around sphere_center,
// times and censoring labels from the generator. Deterministic per seed.
Dataset gen_dataset(int n, const std::vector<double>& sphere_center,
                    double sphere_radius, const WeibullCoxGen& gen);

// Clustered contamination protocol: n_total points from the unit sphere at
// (2,2,2,2,2), then the first n_total - n_clean are replaced by points from
// the unit sphere at (5,5,5,5,5) whose times exceed the largest clean time
// (rejection sampled, capped). n_clean == n_total means no contamination.
Dataset gen_contaminated(int n_clean, int n_total, std::uint64_t seed,
                         int rejection_cap = 1000000);

}  // namespace coxplain

#include "coxplain/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coxplain/explain.hpp"
#include "coxplain/rng.hpp"

namespace coxplain {

double gen_survival_time(std::span<const double> x, const WeibullCoxGen& gen,
                         double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("gen_survival_time: u must lie in (0, 1)");
  }
  if (x.size() != gen.coefficients.size()) {
    throw std::invalid_argument("gen_survival_time: dimension mismatch");
  }
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += x[j] * gen.coefficients[j];
  const double t =
      std::pow(-std::log(u) / (gen.scale * std::exp(eta)), 1.0 / gen.shape);
  return std::min(t, gen.truncation);
}

namespace {

std::vector<std::string> default_names(std::size_t d) {
  std::vector<std::string> names(d);
  for (std::size_t j = 0; j < d; ++j) names[j] = "x" + std::to_string(j);
  return names;
}

SurvivalSample draw_sample(const std::vector<double>& center, double radius,
                           const WeibullCoxGen& gen, Rng& rng) {
  auto point = sample_sphere(center, radius, 1, rng).front();
  SurvivalSample s;
  s.event_time = gen_survival_time(point, gen, rng.uniform_open01());
  s.event_observed = rng.uniform01() >= gen.censor_prob;
  s.features = std::move(point);
  return s;
}

}  // namespace

Dataset gen_dataset(int n, const std::vector<double>& sphere_center,
                    double sphere_radius, const WeibullCoxGen& gen) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be >= 1");
  if (sphere_center.size() != gen.coefficients.size()) {
    throw std::invalid_argument("gen_dataset: dimension mismatch");
  }
  Rng rng(gen.seed);
  std::vector<SurvivalSample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    samples.push_back(draw_sample(sphere_center, sphere_radius, gen, rng));
  }
  return Dataset(std::move(samples), default_names(sphere_center.size()));
}

Dataset gen_contaminated(int n_clean, int n_total, std::uint64_t seed,
                         int rejection_cap) {
  if (!(n_total >= n_clean && n_clean >= 4)) {
    throw std::invalid_argument(
        "gen_contaminated: need n_total >= n_clean >= 4");
  }
  WeibullCoxGen clean_gen;
  clean_gen.coefficients = {1e-6, 0.1, 0.35, 1e-6, 1e-6};
  clean_gen.seed = seed;
  const std::vector<double> clean_center(5, 2.0);

  WeibullCoxGen contam_gen;
  contam_gen.coefficients = {1e-6, -0.6, 1e-6, 1e-6, -0.15};
  contam_gen.seed = derive_seed(seed, 1);
  const std::vector<double> contam_center(5, 5.0);

  Dataset base = gen_dataset(n_total, clean_center, 1.0, clean_gen);
  const int n_replace = n_total - n_clean;
  if (n_replace == 0) return base;

  double t_max = 0.0;
  for (const auto& s : base.samples()) t_max = std::max(t_max, s.event_time);

  std::vector<SurvivalSample> samples = base.samples();
  Rng rng(contam_gen.seed);
  int placed = 0;
  int draws = 0;
  while (placed < n_replace) {
    if (++draws > rejection_cap) {
      throw std::runtime_error(
          "gen_contaminated: rejection sampling exceeded the retry cap");
    }
    SurvivalSample s = draw_sample(contam_center, 1.0, contam_gen, rng);
    if (s.event_time > t_max) {
      samples[static_cast<std::size_t>(placed)] = std::move(s);
      ++placed;
    }
  }
  return Dataset(std::move(samples), base.feature_names());
}

}  // namespace coxplain

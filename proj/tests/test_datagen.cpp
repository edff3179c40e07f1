#include "coxplain/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "coxplain/rng.hpp"
#include "doctest.h"

using namespace coxplain;

namespace {

// One-sided KS distance between sorted draws and an analytic CDF.
double ks_distance(std::vector<double> draws, double rate, double shape) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = 1.0 - std::exp(-rate * std::pow(draws[i], shape));
    const double hi = (static_cast<double>(i) + 1.0) / n;
    const double lo = static_cast<double>(i) / n;
    worst = std::max(worst, std::max(std::abs(cdf - hi), std::abs(cdf - lo)));
  }
  return worst;
}

// Kaplan-Meier survival estimate evaluated at each event time.
std::vector<std::pair<double, double>> kaplan_meier(const Dataset& data) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data[a].event_time < data[b].event_time;
  });
  std::vector<std::pair<double, double>> curve;
  double surv = 1.0;
  std::size_t i = 0;
  const double n = static_cast<double>(data.size());
  while (i < order.size()) {
    const double tau = data[order[i]].event_time;
    double deaths = 0, leaving = 0;
    std::size_t k = i;
    while (k < order.size() && data[order[k]].event_time == tau) {
      leaving += 1;
      if (data[order[k]].event_observed) deaths += 1;
      ++k;
    }
    const double at_risk = n - static_cast<double>(i);
    if (deaths > 0) {
      surv *= 1.0 - deaths / at_risk;
      curve.emplace_back(tau, surv);
    }
    i = k;
  }
  return curve;
}

}  // namespace

TEST_SUITE_BEGIN("datagen");

TEST_CASE("survival time formula evaluates exactly") {
  WeibullCoxGen gen;
  gen.coefficients = {0.0};
  const std::vector<double> x = {1.0};
  CHECK(gen_survival_time(x, gen, 0.5) ==
        doctest::Approx(std::sqrt(std::log(2.0) / 1e-5)).epsilon(1e-12));
  CHECK(gen_survival_time(x, gen, 0.5) == doctest::Approx(263.28).epsilon(1e-4));
  // Raw values beyond the truncation cap collapse onto it.
  const double u_tiny = std::exp(-1e-5 * 5000.0 * 5000.0);
  CHECK(gen_survival_time(x, gen, u_tiny) == doctest::Approx(2000.0));
  // u near one gives vanishing times.
  CHECK(gen_survival_time(x, gen, 1.0 - 1e-12) < 1.0);
  CHECK_THROWS_AS(static_cast<void>(gen_survival_time(x, gen, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("inverse transform matches the analytic law at 1e5 draws") {
  WeibullCoxGen gen;
  gen.coefficients = {0.3, -0.2};
  gen.truncation = 1e18;  // pre-truncation law
  const std::vector<double> x = {0.7, 1.1};
  const double rate = gen.scale * std::exp(0.3 * 0.7 - 0.2 * 1.1);
  Rng rng(2718);
  std::vector<double> draws(100000);
  for (auto& t : draws) t = gen_survival_time(x, gen, rng.uniform_open01());
  CHECK(ks_distance(std::move(draws), rate, gen.shape) <= 0.01);
}

TEST_CASE("generated datasets respect the sampling contract") {
  WeibullCoxGen gen;
  gen.coefficients = {0.1, 0.1, 0.1};
  gen.seed = 99;
  const std::vector<double> center = {1.0, 2.0, 3.0};
  const Dataset data = gen_dataset(1000, center, 4.0, gen);
  CHECK(data.size() == 1000);
  int events = 0;
  for (const auto& s : data.samples()) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double diff = s.features[j] - center[j];
      dist2 += diff * diff;
    }
    CHECK(dist2 <= 16.0 + 1e-9);
    if (s.event_observed) ++events;
  }
  CHECK(std::abs(events / 1000.0 - 0.9) <= 0.03);
}

TEST_CASE("identical seeds reproduce datasets exactly") {
  WeibullCoxGen gen;
  gen.coefficients = {0.2, 0.0};
  gen.seed = 314;
  const Dataset a = gen_dataset(50, {0.0, 0.0}, 2.0, gen);
  const Dataset b = gen_dataset(50, {0.0, 0.0}, 2.0, gen);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].features == b[i].features);
    CHECK(a[i].event_time == b[i].event_time);
    CHECK(a[i].event_observed == b[i].event_observed);
  }
}

TEST_CASE("null effects make Kaplan-Meier track the base Weibull") {
  WeibullCoxGen gen;
  gen.coefficients = {0.0, 0.0};
  gen.seed = 162;
  const Dataset data = gen_dataset(2000, {0.0, 0.0}, 8.0, gen);
  double worst = 0.0;
  for (const auto& [t, s] : kaplan_meier(data)) {
    worst = std::max(worst, std::abs(s - std::exp(-gen.scale * t * t)));
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("contamination protocol") {
  const Dataset clean = gen_contaminated(100, 100, 7);
  for (const auto& s : clean.samples()) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double diff = s.features[j] - 2.0;
      dist2 += diff * diff;
    }
    CHECK(dist2 <= 1.0 + 1e-9);
  }

  const Dataset mixed = gen_contaminated(75, 100, 7);
  CHECK(mixed.size() == 100);
  // The tail of the mixed set is exactly the clean draw.
  for (std::size_t i = 25; i < 100; ++i) {
    CHECK(mixed[i].features == clean[i].features);
    CHECK(mixed[i].event_time == clean[i].event_time);
  }
  double max_clean_time = 0.0;
  for (std::size_t i = 25; i < 100; ++i) {
    max_clean_time = std::max(max_clean_time, mixed[i].event_time);
  }
  int contaminants = 0;
  for (std::size_t i = 0; i < 25; ++i) {
    const auto& s = mixed[i];
    double dist2 = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double diff = s.features[j] - 5.0;
      dist2 += diff * diff;
    }
    CHECK(dist2 <= 1.0 + 1e-9);
    CHECK(s.event_time > max_clean_time);
    ++contaminants;
  }
  CHECK(contaminants == 100 / 4);

  // Clusters never overlap: unit spheres three apart in every coordinate.
  for (std::size_t i = 0; i < 25; ++i) {
    for (std::size_t j = 25; j < 100; ++j) {
      double dist2 = 0.0;
      for (std::size_t c = 0; c < 5; ++c) {
        const double diff = mixed[i].features[c] - mixed[j].features[c];
        dist2 += diff * diff;
      }
      CHECK(dist2 > 0.0);
    }
  }
}

TEST_CASE("rejection sampling respects the retry cap") {
  CHECK_THROWS_AS(static_cast<void>(gen_contaminated(4, 8, 3, 1)),
                  std::runtime_error);
}

TEST_SUITE_END();

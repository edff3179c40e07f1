#include "coxplain/rsf.hpp"

#include <cmath>

#include "coxplain/rng.hpp"
#include "doctest.h"

using namespace coxplain;

namespace {

Dataset random_dataset(Rng& rng, int n, int d) {
  std::vector<SurvivalSample> samples;
  for (int i = 0; i < n; ++i) {
    SurvivalSample s;
    for (int j = 0; j < d; ++j) s.features.push_back(rng.uniform(-2, 2));
    s.event_time = 1.0 + rng.uniform_index(10);
    s.event_observed = rng.uniform01() < 0.8;
    samples.push_back(std::move(s));
  }
  samples[0].event_observed = true;
  std::vector<std::string> names;
  for (int j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
  return Dataset(std::move(samples), std::move(names));
}

// Independent naive log-rank computation over distinct event times.
double log_rank_oracle(const std::vector<double>& times,
                       const std::vector<char>& events,
                       const std::vector<char>& in_left) {
  std::vector<double> distinct;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (events[i]) distinct.push_back(times[i]);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  double ome = 0.0, var = 0.0;
  for (const double tau : distinct) {
    double n_tot = 0, n_left = 0, d_tot = 0, d_left = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= tau) {
        n_tot += 1;
        if (in_left[i]) n_left += 1;
      }
      if (events[i] && times[i] == tau) {
        d_tot += 1;
        if (in_left[i]) d_left += 1;
      }
    }
    if (n_tot <= 1) continue;
    const double p = n_left / n_tot;
    ome += d_left - d_tot * p;
    var += d_tot * p * (1 - p) * (n_tot - d_tot) / (n_tot - 1);
  }
  if (var <= 0) return -1.0;
  return ome * ome / var;
}

}  // namespace

TEST_SUITE_BEGIN("rsf");

TEST_CASE("splitter statistic matches the naive oracle on small datasets") {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(7));  // up to 8
    std::vector<double> times(static_cast<std::size_t>(n));
    std::vector<char> events(static_cast<std::size_t>(n));
    std::vector<char> in_left(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      times[static_cast<std::size_t>(i)] = 1.0 + static_cast<double>(rng.uniform_index(4));
      events[static_cast<std::size_t>(i)] = rng.uniform01() < 0.7 ? 1 : 0;
      in_left[static_cast<std::size_t>(i)] = rng.uniform01() < 0.5 ? 1 : 0;
    }
    const double mine = log_rank_statistic(times, events, in_left);
    const double theirs = log_rank_oracle(times, events, in_left);
    if (theirs < 0) {
      CHECK(mine < 0);
    } else {
      CHECK(mine == doctest::Approx(theirs).epsilon(1e-12));
    }
  }
}

TEST_CASE("a perfectly separating binary feature is chosen at the root") {
  // Feature 0 separates early events from late events; feature 1 is noise.
  std::vector<SurvivalSample> samples;
  Rng rng(77);
  for (int i = 0; i < 12; ++i) {
    const bool early = i < 6;
    samples.push_back({{early ? 1.0 : 0.0, rng.uniform(-1, 1)},
                       early ? 1.0 + 0.1 * i : 10.0 + 0.1 * i,
                       true});
  }
  const Dataset data(std::move(samples), {"flag", "noise"});
  RsfParams params;
  params.n_trees = 1;
  params.min_leaf_size = 6;  // whole groups stay intact below the root
  params.features_per_split = 2;
  params.bootstrap = false;
  params.seed = 5;
  const RsfModel model = fit_rsf(data, params);
  const auto& root = model.trees()[0].nodes()[0];
  CHECK(root.feature == 0);
  const auto left = model.predict_chf({1.0, 0.0});
  const auto right = model.predict_chf({0.0, 0.0});
  // The early group accumulates hazard sooner.
  CHECK(left.value(0) > right.value(0));
}

TEST_CASE("degenerate forest equals the pooled estimator") {
  Rng rng(88);
  const Dataset data = random_dataset(rng, 20, 3);
  RsfParams params;
  params.n_trees = 1;
  params.min_leaf_size = 20;
  params.bootstrap = false;
  const RsfModel model = fit_rsf(data, params);
  const auto baseline = nelson_aalen(data, model.grid());
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2),
                                   rng.uniform(-2, 2)};
    const auto pred = model.predict_chf(x);
    for (std::size_t j = 0; j < pred.interval_count(); ++j) {
      CHECK(pred.value(j) == doctest::Approx(baseline.value(j)).epsilon(1e-15));
    }
  }
}

TEST_CASE("same seed grows bit-identical forests") {
  Rng rng(99);
  const Dataset data = random_dataset(rng, 30, 3);
  RsfParams params;
  params.n_trees = 12;
  params.seed = 2024;
  const RsfModel a = fit_rsf(data, params);
  const RsfModel b = fit_rsf(data, params);
  CHECK(rsf_to_json(a) == rsf_to_json(b));
  params.seed = 2025;
  const RsfModel c = fit_rsf(data, params);
  CHECK(rsf_to_json(a) != rsf_to_json(c));
}

TEST_CASE("ensemble prediction stays inside the leaf envelope and monotone") {
  Rng rng(111);
  const Dataset data = random_dataset(rng, 40, 3);
  RsfParams params;
  params.n_trees = 15;
  params.seed = 7;
  const RsfModel model = fit_rsf(data, params);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2),
                                   rng.uniform(-2, 2)};
    const auto pred = model.predict_chf(x);
    for (std::size_t j = 0; j < pred.interval_count(); ++j) {
      double lo = 1e300, hi = -1e300;
      for (const auto& tree : model.trees()) {
        const double v = tree.route(x)[j];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      CHECK(pred.value(j) >= std::min(lo, pred.epsilon()) - 1e-12);
      CHECK(pred.value(j) <= std::max(hi, pred.epsilon()) + 1e-12);
      if (j > 0) CHECK(pred.value(j) >= pred.value(j - 1) - 1e-15);
    }
  }
}

TEST_CASE("pooled-leaf forests reproduce the dataset estimator for every x") {
  Rng rng(123);
  const Dataset data = random_dataset(rng, 24, 2);
  RsfParams params;
  params.n_trees = 4;
  params.min_leaf_size = 24;
  params.bootstrap = false;
  const RsfModel model = fit_rsf(data, params);
  const auto pooled = nelson_aalen(data, model.grid());
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = {rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto pred = model.predict_chf(x);
    for (std::size_t j = 0; j < pred.interval_count(); ++j) {
      CHECK(pred.value(j) == doctest::Approx(pooled.value(j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("json round trip preserves routed predictions") {
  Rng rng(321);
  const Dataset data = random_dataset(rng, 30, 3);
  RsfParams params;
  params.n_trees = 8;
  params.seed = 13;
  const RsfModel model = fit_rsf(data, params);
  const RsfModel restored = rsf_from_json(rsf_to_json(model));
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> x = {rng.uniform(-2, 2), rng.uniform(-2, 2),
                                   rng.uniform(-2, 2)};
    const auto a = model.predict_chf(x);
    const auto b = restored.predict_chf(x);
    for (std::size_t j = 0; j < a.interval_count(); ++j) {
      CHECK(a.value(j) == b.value(j));
    }
  }
}

TEST_CASE("fit preconditions") {
  RsfParams params;
  const Dataset all_censored({{{0.0}, 1.0, false}, {{1.0}, 2.0, false}}, {"x"});
  CHECK_THROWS_AS(static_cast<void>(fit_rsf(all_censored, params)),
                  std::invalid_argument);
  params.n_trees = 0;
  Rng rng(5);
  const Dataset data = random_dataset(rng, 8, 2);
  CHECK_THROWS_AS(static_cast<void>(fit_rsf(data, params)), std::invalid_argument);
}

TEST_SUITE_END();

#include "coxplain/explain.hpp"

#include <cmath>

#include "coxplain/datagen.hpp"
#include "coxplain/ks.hpp"
#include "doctest.h"

using namespace coxplain;

namespace {

// Black box that always returns its training Nelson-Aalen curve: the
// surrogate's baseline coincides with every prediction.
class FlatBlackBox : public BlackBox {
 public:
  explicit FlatBlackBox(Dataset training)
      : training_(std::move(training)),
        grid_(build_time_grid(training_)),
        curve_(nelson_aalen(training_, grid_)) {}
  ChfCurve predict_chf(const std::vector<double>&) const override {
    return curve_;
  }
  TimeGridPtr grid() const override { return grid_; }
  int training_size() const override { return static_cast<int>(training_.size()); }
  const Dataset* training_data() const override { return &training_; }

 private:
  Dataset training_;
  TimeGridPtr grid_;
  ChfCurve curve_;
};

Dataset tiny_training(std::uint64_t seed, int n = 30, int d = 2) {
  WeibullCoxGen gen;
  gen.coefficients = std::vector<double>(static_cast<std::size_t>(d), 0.2);
  gen.seed = seed;
  return gen_dataset(n, std::vector<double>(static_cast<std::size_t>(d), 0.0), 2.0, gen);
}

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(b) / (a.norm() * b.norm());
}

}  // namespace

TEST_SUITE_BEGIN("explain");

TEST_CASE("sample_sphere stays inside the ball and concentrates correctly") {
  Rng rng(1);
  const std::vector<double> center = {1.0, -2.0, 0.5, 3.0, 0.0};
  const auto pts = sample_sphere(center, 1.0, 100000, rng);
  int inside_half = 0;
  std::vector<double> mean(5, 0.0);
  for (const auto& p : pts) {
    double dist2 = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      const double diff = p[j] - center[j];
      dist2 += diff * diff;
      mean[j] += p[j];
    }
    CHECK(dist2 <= 1.0 + 1e-12);
    if (dist2 <= 0.25) ++inside_half;
  }
  for (std::size_t j = 0; j < 5; ++j) {
    CHECK(mean[j] / 100000.0 == doctest::Approx(center[j]).epsilon(0).scale(1).epsilon(0.02));
  }
  // Volume ratio of the half-radius ball in five dimensions.
  CHECK(inside_half / 100000.0 == doctest::Approx(0.03125).epsilon(0).scale(1).epsilon(0.16));
  CHECK(std::abs(inside_half / 100000.0 - 0.03125) <= 0.005);

  Rng rng2(2);
  const auto tiny = sample_sphere(center, 1e-12, 10, rng2);
  for (const auto& p : tiny) {
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(p[j] == doctest::Approx(center[j]).epsilon(1e-9));
    }
  }
}

TEST_CASE("neighbor_weight formula") {
  const std::vector<double> x = {0.0, 0.0};
  CHECK(neighbor_weight(x, {0.0, 0.0}, 0.1) == 1.0);
  CHECK(neighbor_weight(x, {0.1, 0.0}, 0.1) == 0.0);
  CHECK(neighbor_weight(x, {0.025, 0.0}, 0.1) == doctest::Approx(0.5));
  // Numeric overshoot clamps instead of going negative.
  CHECK(neighbor_weight(x, {0.2, 0.0}, 0.1) == 0.0);
}

TEST_CASE("identity black box with ridge yields exactly zero coefficients") {
  const FlatBlackBox bb(tiny_training(10));
  ExplainConfig config;
  config.n_neighbors = 50;
  config.ridge = 0.5;
  config.seed = 3;
  const std::vector<double> x = {0.2, -0.1};
  const Explanation e = explain(bb, x, config);
  CHECK(e.coefficients.norm() == 0.0);
  CHECK(e.rse_at_x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gamma=1 robust path equals the precise reduction") {
  const Dataset train = tiny_training(20, 40, 2);
  const CoxBlackBox bb(fit_cox(train), train);
  ExplainConfig config;
  config.n_neighbors = 40;
  config.ridge = 0.1;
  config.seed = 11;
  const std::vector<double> x = {0.4, 0.3};
  const Neighborhood nb = build_neighborhood(bb, x, config);

  const Explanation robust = explain_neighborhood(nb, x, 1.0, config.ridge, config);

  // Independent reduction: full theta matrix fed to the precise solver.
  const std::size_t m1 = nb.baseline.interval_count();
  Eigen::MatrixXd theta(nb.points.rows(), static_cast<Eigen::Index>(m1));
  for (Eigen::Index k = 0; k < nb.points.rows(); ++k) {
    for (std::size_t j = 0; j < m1; ++j) {
      theta(k, static_cast<Eigen::Index>(j)) =
          std::log(nb.curves[static_cast<std::size_t>(k)].value(j)) -
          std::log(nb.baseline.value(j));
    }
  }
  const ExplanationResult precise =
      solve_precise(nb.points, nb.weights, theta, config.ridge);
  CHECK((robust.coefficients - precise.coefficients).norm() <= 1e-10);
}

TEST_CASE("explanations are deterministic in the seed") {
  const Dataset train = tiny_training(30, 40, 2);
  const CoxBlackBox bb(fit_cox(train), train);
  ExplainConfig config;
  config.n_neighbors = 30;
  config.ridge = 1.0;
  config.gamma = 0.1;
  config.seed = 17;
  const std::vector<double> x = {0.1, 0.2};
  const Explanation a = explain(bb, x, config);
  const Explanation b = explain(bb, x, config);
  CHECK((a.coefficients - b.coefficients).norm() == 0.0);
  CHECK(explanation_to_json(a) == explanation_to_json(b));
  config.seed = 18;
  const Explanation c = explain(bb, x, config);
  CHECK((a.coefficients - c.coefficients).norm() > 0.0);
}

TEST_CASE("neighbor ordering does not change the solution") {
  const Dataset train = tiny_training(40, 40, 2);
  const CoxBlackBox bb(fit_cox(train), train);
  ExplainConfig config;
  config.n_neighbors = 25;
  config.ridge = 0.3;
  config.seed = 23;
  const std::vector<double> x = {0.0, 0.5};
  Neighborhood nb = build_neighborhood(bb, x, config);
  const Explanation base = explain_neighborhood(nb, x, 0.05, config.ridge, config);

  // Reverse the neighbor rows (keeping curves aligned).
  Neighborhood reversed = nb;
  const Eigen::Index n = nb.points.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    reversed.points.row(k) = nb.points.row(n - 1 - k);
    reversed.weights[k] = nb.weights[n - 1 - k];
    reversed.curves[static_cast<std::size_t>(k)] =
        nb.curves[static_cast<std::size_t>(n - 1 - k)];
  }
  const Explanation perm = explain_neighborhood(reversed, x, 0.05, config.ridge, config);
  CHECK((base.coefficients - perm.coefficients).norm() <=
        1e-7 * (1.0 + base.coefficients.norm()));
}

TEST_CASE("weights lie in [0,1] and only the center reaches 1") {
  const Dataset train = tiny_training(50, 30, 2);
  const CoxBlackBox bb(fit_cox(train), train);
  ExplainConfig config;
  config.n_neighbors = 60;
  config.ridge = 1.0;
  config.seed = 29;
  const std::vector<double> x = {0.3, 0.3};
  const Neighborhood nb = build_neighborhood(bb, x, config);
  for (Eigen::Index k = 0; k < nb.weights.size(); ++k) {
    CHECK(nb.weights[k] >= 0.0);
    CHECK(nb.weights[k] <= 1.0);
    if (k < nb.weights.size() - 1) CHECK(nb.weights[k] < 1.0);
  }
  CHECK(nb.weights[nb.weights.size() - 1] == 1.0);
}

TEST_CASE("reported rse matches an external recomputation") {
  const Dataset train = tiny_training(60, 40, 2);
  const CoxBlackBox bb(fit_cox(train), train);
  ExplainConfig config;
  config.n_neighbors = 30;
  config.ridge = 0.5;
  config.seed = 31;
  const std::vector<double> x = {0.2, 0.2};
  const Explanation e = explain(bb, x, config);
  CHECK(e.rse_at_x == rse(e.blackbox_chf, e.approx_chf));
}

TEST_CASE("self-explanation of a Cox black box recovers its coefficients") {
  WeibullCoxGen gen;
  gen.coefficients = {-0.25, 1e-6, -0.1, 0.35, 1e-6};
  gen.seed = 404;
  const Dataset train = gen_dataset(200, std::vector<double>(5, 0.0), 8.0, gen);
  const CoxModel model = fit_cox(train);
  const CoxBlackBox bb(model, train);
  ExplainConfig config;
  config.ridge = 1.0;
  config.seed = 405;
  Rng rng(406);
  const auto x = sample_sphere(std::vector<double>(5, 0.0), 8.0, 1, rng).front();
  const Explanation e = explain(bb, x, config);
  CHECK(cosine(e.coefficients, model.coefficients()) >= 0.95);
}

TEST_CASE("config validation") {
  ExplainConfig config;  // ridge left unset
  CHECK_THROWS_AS(config.validate(2), std::invalid_argument);
  config.ridge = 1.0;
  config.n_neighbors = 2;
  CHECK_THROWS_AS(config.validate(2), std::invalid_argument);
  config.n_neighbors = 100;
  config.gamma = 0.0;
  CHECK_THROWS_AS(config.validate(2), std::invalid_argument);
  config.gamma = 1.0;
  CHECK_NOTHROW(config.validate(2));
}

TEST_SUITE_END();

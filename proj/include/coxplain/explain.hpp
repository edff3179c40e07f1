#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "coxplain/cox.hpp"
#include "coxplain/rng.hpp"
#include "coxplain/rsf.hpp"
#include "coxplain/solver.hpp"
#include "coxplain/survival.hpp"

namespace coxplain {

// Anything that maps a feature vector to a cumulative hazard curve on a fixed
// grid. training_size feeds the band halfwidth; training_data (when present)
// supplies the surrogate's baseline hazard.
class BlackBox {
 public:
  virtual ~BlackBox() = default;
  virtual ChfCurve predict_chf(const std::vector<double>& x) const = 0;
  virtual TimeGridPtr grid() const = 0;
  virtual int training_size() const = 0;
  virtual const Dataset* training_data() const { return nullptr; }
};

class CoxBlackBox : public BlackBox {
 public:
  CoxBlackBox(CoxModel model, Dataset training)
      : model_(std::move(model)), training_(std::move(training)) {}
  ChfCurve predict_chf(const std::vector<double>& x) const override {
    return model_.predict_chf(x);
  }
  TimeGridPtr grid() const override { return model_.grid(); }
  int training_size() const override { return static_cast<int>(training_.size()); }
  const Dataset* training_data() const override { return &training_; }
  const CoxModel& model() const { return model_; }

 private:
  CoxModel model_;
  Dataset training_;
};

class RsfBlackBox : public BlackBox {
 public:
  RsfBlackBox(RsfModel model, Dataset training)
      : model_(std::move(model)), training_(std::move(training)) {}
  ChfCurve predict_chf(const std::vector<double>& x) const override {
    return model_.predict_chf(x);
  }
  TimeGridPtr grid() const override { return model_.grid(); }
  int training_size() const override { return static_cast<int>(training_.size()); }
  const Dataset* training_data() const override { return &training_; }
  const RsfModel& model() const { return model_; }

 private:
  RsfModel model_;
  Dataset training_;
};

struct ExplainConfig {
  int n_neighbors = 1000;
  double radius = 0.1;
  double gamma = 1.0;  // 1 disables the bands
  // Regularization strength has no universal default across black boxes, so
  // it must be set explicitly.
  double ridge = std::numeric_limits<double>::quiet_NaN();
  double epsilon = kDefaultEpsilon;
  std::uint64_t seed = 0;
  double solver_tol = 1e-8;
  int solver_max_iter = 10000;

  void validate(std::size_t dim) const;
};

struct Explanation {
  Eigen::VectorXd coefficients;
  std::vector<std::string> feature_names;
  ChfCurve approx_chf;
  ChfCurve blackbox_chf;
  double rse_at_x = 0.0;
  double gamma = 1.0;
  double ridge = 0.0;
  ExplanationResult solver_diagnostics;
};

// Points uniform in the solid ball: Gaussian direction, U^(1/d) radial law.
std::vector<std::vector<double>> sample_sphere(const std::vector<double>& center,
                                               double radius, int count,
                                               Rng& rng);

// w = 1 - sqrt(|x - x_k| / r), clamped into [0, 1].
double neighbor_weight(const std::vector<double>& x,
                       const std::vector<double>& x_k, double radius);

// Everything about one sampled neighborhood that does not depend on gamma or
// ridge: points, weights, the black-box curve per point, and the baseline.
// Sweeps over (gamma, ridge) reuse one of these.
struct Neighborhood {
  Eigen::MatrixXd points;   // (N+1) x d, last row is the explained point
  Eigen::VectorXd weights;  // N+1, last entry 1
  std::vector<ChfCurve> curves;
  ChfCurve baseline;
  int training_size = 0;
  std::vector<std::string> feature_names;
};

Neighborhood build_neighborhood(const BlackBox& blackbox,
                                const std::vector<double>& x,
                                const ExplainConfig& config);

Explanation explain_neighborhood(const Neighborhood& nb,
                                 const std::vector<double>& x, double gamma,
                                 double ridge, const ExplainConfig& config);

// Full pipeline: sample, weight, query, band, solve, package.
Explanation explain(const BlackBox& blackbox, const std::vector<double>& x,
                    const ExplainConfig& config);

std::string explanation_to_json(const Explanation& e);

}  // namespace coxplain

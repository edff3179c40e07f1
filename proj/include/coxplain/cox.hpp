#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "coxplain/survival.hpp"

namespace coxplain {

struct CoxFitOptions {
  double newton_tol = 1e-8;     // gradient norm at convergence
  int max_iter = 100;
  double epsilon = kDefaultEpsilon;
  double separation_guard = 50.0;  // |b| beyond this means monotone likelihood
};

// Fit failure carrying the last iterate (useful for diagnosing separation
// and non-convergence).
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, Eigen::VectorXd last_iterate)
      : std::runtime_error(what), last_iterate_(std::move(last_iterate)) {}
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }

 private:
  Eigen::VectorXd last_iterate_;
};

// Proportional hazards model: H(t|x) = H_0(t) * exp(x.b).
class CoxModel {
 public:
  CoxModel(Eigen::VectorXd coefficients, ChfCurve baseline_chf);

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  const ChfCurve& baseline_chf() const { return baseline_; }
  const TimeGridPtr& grid() const { return baseline_.grid(); }
  double epsilon() const { return baseline_.epsilon(); }

  // Baseline scaled by exp(x.b), floored at epsilon.
  ChfCurve predict_chf(const std::vector<double>& x) const;
  double risk_score(const std::vector<double>& x) const;  // x.b

 private:
  Eigen::VectorXd coefficients_;
  ChfCurve baseline_;
};

// Newton-Raphson maximization of the Breslow-tie log partial likelihood with
// step halving; the baseline is the Breslow cumulative hazard on the
// dataset's grid. Throws FitError on non-convergence or separation.
CoxModel fit_cox(const Dataset& dataset, const CoxFitOptions& options = {});

// Log partial likelihood and its analytic gradient at b (Breslow ties).
// Exposed so the optimizer can be validated against finite differences.
double cox_log_likelihood(const Dataset& dataset, const Eigen::VectorXd& b);
Eigen::VectorXd cox_gradient(const Dataset& dataset, const Eigen::VectorXd& b);

// JSON document {coefficients, grid, baseline, horizon, epsilon}; the first
// three field names are load-bearing for cross-run artifacts.
std::string cox_to_json(const CoxModel& model);
CoxModel cox_from_json(const std::string& text);

}  // namespace coxplain

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace coxplain {

// Assembled optimization instance: minimize over b
//   sum_k w_k * max(Q_k - x_k.b, x_k.b - R_k) + ridge * |b|^2
// where row k of neighbor_features is x_k, Q_k = q_upper(k) and
// R_k = r_lower(k) with R_k <= Q_k.
struct ExplanationProblem {
  Eigen::MatrixXd neighbor_features;  // N x d
  Eigen::VectorXd weights;            // N, non-negative, at least one > 0
  Eigen::VectorXd q_upper;            // N
  Eigen::VectorXd r_lower;            // N
  double ridge = 0.0;

  void validate() const;
};

struct ExplanationResult {
  Eigen::VectorXd coefficients;  // b
  Eigen::VectorXd slacks;        // z_k = max(Q_k - x_k.b, x_k.b - R_k)
  double objective = 0.0;
  Eigen::VectorXd dual_alpha;    // multiplier of z_k + x_k.b >= Q_k
  Eigen::VectorXd dual_beta;     // multiplier of z_k - x_k.b >= -R_k
  double kkt_residual = 0.0;     // distance from 0 to the subdifferential
  int iterations = 0;
  bool non_unique = false;       // ridge = 0 and active rows do not pin b
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, ExplanationResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const ExplanationResult& best() const { return best_; }

 private:
  ExplanationResult best_;
};

// Minimizes the objective above to a subgradient residual <= tol. Throws
// SolverError carrying the best iterate when the residual cannot be reached
// within max_iter inner iterations.
ExplanationResult solve_robust(const ExplanationProblem& problem,
                               double tol = 1e-8, int max_iter = 10000);

// Precise variant: collapses a full theta matrix (N rows, one entry per time
// interval) to Q_k = max_j theta_kj, R_k = min_j theta_kj and solves the same
// program. ridge = 0 reproduces the pure linear program.
ExplanationResult solve_precise(const Eigen::MatrixXd& neighbor_features,
                                const Eigen::VectorXd& weights,
                                const Eigen::MatrixXd& theta,
                                double ridge = 0.0, double tol = 1e-8,
                                int max_iter = 10000);

// Value of the dual objective sum_k (Q_k alpha_k - R_k beta_k) after checking
// feasibility: alpha, beta >= 0, alpha_k + beta_k <= w_k and the stationarity
// equality sum_k x_k (alpha_k - beta_k) = 0, each to feas_tol. Throws with the
// largest violation otherwise. A weak lower bound on the ridge-free optimum.
double dual_value(const ExplanationProblem& problem,
                  const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                  double feas_tol = 1e-6);

}  // namespace coxplain

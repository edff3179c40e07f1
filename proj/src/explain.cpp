#include "coxplain/explain.hpp"

#include <cmath>
#include <stdexcept>

#include "coxplain/ks.hpp"
#include "json.hpp"

namespace coxplain {

void ExplainConfig::validate(std::size_t dim) const {
  if (n_neighbors < static_cast<int>(dim) + 1) {
    throw std::invalid_argument("ExplainConfig: n_neighbors must be >= d+1");
  }
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ExplainConfig: radius must be positive");
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("ExplainConfig: gamma must lie in (0, 1]");
  }
  if (!std::isfinite(ridge) || ridge < 0.0) {
    throw std::invalid_argument(
        "ExplainConfig: ridge must be set explicitly and be >= 0");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("ExplainConfig: epsilon must be positive");
  }
}

std::vector<std::vector<double>> sample_sphere(const std::vector<double>& center,
                                               double radius, int count,
                                               Rng& rng) {
  if (!(radius > 0.0) || count < 1) {
    throw std::invalid_argument("sample_sphere: radius > 0 and count >= 1 required");
  }
  const std::size_t d = center.size();
  std::vector<std::vector<double>> points(static_cast<std::size_t>(count));
  for (auto& p : points) {
    p.resize(d);
    double norm2 = 0.0;
    for (auto& v : p) {
      v = rng.gaussian();
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    const double u = rng.uniform_open01();
    const double r = radius * std::pow(u, 1.0 / static_cast<double>(d));
    const double scale = norm > 0.0 ? r / norm : 0.0;
    for (std::size_t j = 0; j < d; ++j) p[j] = center[j] + scale * p[j];
  }
  return points;
}

double neighbor_weight(const std::vector<double>& x,
                       const std::vector<double>& x_k, double radius) {
  double dist2 = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - x_k[j];
    dist2 += diff * diff;
  }
  const double w = 1.0 - std::sqrt(std::sqrt(dist2) / radius);
  return std::clamp(w, 0.0, 1.0);
}

Neighborhood build_neighborhood(const BlackBox& blackbox,
                                const std::vector<double>& x,
                                const ExplainConfig& config) {
  config.validate(x.size());
  const Dataset* training = blackbox.training_data();
  if (training == nullptr) {
    throw std::invalid_argument(
        "build_neighborhood: black box exposes no training data for the baseline");
  }

  const std::size_t d = x.size();
  const int n = config.n_neighbors;
  Rng rng(config.seed);
  auto sampled = sample_sphere(x, config.radius, n, rng);
  sampled.push_back(x);  // the explained point anchors the fit with weight 1

  Neighborhood nb{Eigen::MatrixXd(n + 1, static_cast<Eigen::Index>(d)),
                  Eigen::VectorXd(n + 1),
                  {},
                  nelson_aalen(*training, blackbox.grid(), config.epsilon),
                  blackbox.training_size(),
                  training->feature_names()};
  nb.curves.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto& p = sampled[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < d; ++j) {
      nb.points(k, static_cast<Eigen::Index>(j)) = p[j];
    }
    nb.weights[k] = neighbor_weight(x, p, config.radius);
    try {
      nb.curves.push_back(blackbox.predict_chf(p));
    } catch (const std::exception& e) {
      throw std::runtime_error("build_neighborhood: black-box prediction failed at neighbor " +
                               std::to_string(k) + ": " + e.what());
    }
  }
  nb.weights[n] = 1.0;
  return nb;
}

Explanation explain_neighborhood(const Neighborhood& nb,
                                 const std::vector<double>& x, double gamma,
                                 double ridge, const ExplainConfig& config) {
  const Eigen::Index rows = nb.points.rows();
  const double halfwidth =
      gamma >= 1.0 ? 0.0 : ks_band_halfwidth(nb.training_size, gamma);

  ExplanationProblem problem;
  problem.neighbor_features = nb.points;
  problem.weights = nb.weights;
  problem.q_upper.resize(rows);
  problem.r_lower.resize(rows);
  problem.ridge = ridge;
  for (Eigen::Index k = 0; k < rows; ++k) {
    const auto& curve = nb.curves[static_cast<std::size_t>(k)];
    const double delta = chf_delta(curve, halfwidth, config.epsilon);
    const ThetaBand band = theta_band(curve, nb.baseline, delta, config.epsilon);
    problem.q_upper[k] = band.q_upper;
    problem.r_lower[k] = band.r_lower;
  }

  ExplanationResult solved =
      solve_robust(problem, config.solver_tol, config.solver_max_iter);

  Eigen::VectorXd xe(nb.points.cols());
  for (Eigen::Index j = 0; j < xe.size(); ++j) {
    xe[j] = x[static_cast<std::size_t>(j)];
  }
  const double scale = std::exp(xe.dot(solved.coefficients));
  std::vector<double> approx = nb.baseline.values();
  for (auto& v : approx) v *= scale;

  Explanation out{solved.coefficients,
                  nb.feature_names,
                  ChfCurve(nb.baseline.grid(), std::move(approx), config.epsilon),
                  nb.curves.back(),
                  0.0,
                  gamma,
                  ridge,
                  std::move(solved)};
  out.rse_at_x = rse(out.blackbox_chf, out.approx_chf);
  return out;
}

Explanation explain(const BlackBox& blackbox, const std::vector<double>& x,
                    const ExplainConfig& config) {
  const Neighborhood nb = build_neighborhood(blackbox, x, config);
  return explain_neighborhood(nb, x, config.gamma, config.ridge, config);
}

std::string explanation_to_json(const Explanation& e) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json coef;
  for (Eigen::Index j = 0; j < e.coefficients.size(); ++j) {
    const auto name = static_cast<std::size_t>(j) < e.feature_names.size()
                          ? e.feature_names[static_cast<std::size_t>(j)]
                          : "x" + std::to_string(j);
    coef[name] = e.coefficients[j];
  }
  doc["coefficients"] = std::move(coef);
  doc["gamma"] = e.gamma;
  doc["ridge"] = e.ridge;
  doc["rse_at_x"] = e.rse_at_x;
  doc["objective"] = e.solver_diagnostics.objective;
  doc["kkt_residual"] = e.solver_diagnostics.kkt_residual;
  doc["iterations"] = e.solver_diagnostics.iterations;
  doc["blackbox_chf"] = {{"grid", e.blackbox_chf.grid()->times()},
                         {"horizon", e.blackbox_chf.grid()->horizon()},
                         {"values", e.blackbox_chf.values()}};
  doc["approx_chf"] = {{"grid", e.approx_chf.grid()->times()},
                       {"horizon", e.approx_chf.grid()->horizon()},
                       {"values", e.approx_chf.values()}};
  return doc.dump(2);
}

}  // namespace coxplain

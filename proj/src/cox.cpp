#include "coxplain/cox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "json.hpp"

namespace coxplain {

namespace {

// Dataset rearranged for risk-set sweeps: samples sorted by time ascending,
// tie groups precomputed.
struct FitData {
  Eigen::MatrixXd x;       // n x d, sorted by time
  Eigen::VectorXd time;    // sorted
  std::vector<char> event;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> groups;  // [begin, end)

  explicit FitData(const Dataset& dataset) {
    const auto n = static_cast<Eigen::Index>(dataset.size());
    const auto d = static_cast<Eigen::Index>(dataset.dim());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return dataset[static_cast<std::size_t>(a)].event_time <
             dataset[static_cast<std::size_t>(b)].event_time;
    });
    x.resize(n, d);
    time.resize(n);
    event.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = dataset[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      for (Eigen::Index j = 0; j < d; ++j) {
        x(i, j) = s.features[static_cast<std::size_t>(j)];
      }
      time[i] = s.event_time;
      event[static_cast<std::size_t>(i)] = s.event_observed ? 1 : 0;
    }
    for (Eigen::Index begin = 0; begin < n;) {
      Eigen::Index end = begin + 1;
      while (end < n && time[end] == time[begin]) ++end;
      groups.emplace_back(begin, end);
      begin = end;
    }
  }
};

struct Evaluation {
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd neg_hessian;  // positive semidefinite
};

// One descending sweep over tie groups accumulating risk-set sums. Linear
// predictors are shifted by their maximum to keep the exponentials bounded.
Evaluation evaluate(const FitData& fd, const Eigen::VectorXd& b,
                    bool with_derivatives) {
  const Eigen::Index d = fd.x.cols();
  const Eigen::VectorXd eta = fd.x * b;
  const double shift = eta.size() > 0 ? eta.maxCoeff() : 0.0;

  Evaluation ev;
  ev.loglik = 0.0;
  if (with_derivatives) {
    ev.gradient = Eigen::VectorXd::Zero(d);
    ev.neg_hessian = Eigen::MatrixXd::Zero(d, d);
  }

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(d, d);

  for (auto git = fd.groups.rbegin(); git != fd.groups.rend(); ++git) {
    const auto [begin, end] = *git;
    for (Eigen::Index i = begin; i < end; ++i) {
      const double e = std::exp(eta[i] - shift);
      s0 += e;
      if (with_derivatives) {
        s1 += e * fd.x.row(i).transpose();
        s2.noalias() += e * (fd.x.row(i).transpose() * fd.x.row(i));
      }
    }
    double d_tau = 0.0;
    double eta_events = 0.0;
    Eigen::VectorXd x_events = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = begin; i < end; ++i) {
      if (fd.event[static_cast<std::size_t>(i)]) {
        d_tau += 1.0;
        eta_events += eta[i];
        if (with_derivatives) x_events += fd.x.row(i).transpose();
      }
    }
    if (d_tau == 0.0) continue;
    ev.loglik += eta_events - d_tau * (std::log(s0) + shift);
    if (with_derivatives) {
      const Eigen::VectorXd mean = s1 / s0;
      ev.gradient += x_events - d_tau * mean;
      ev.neg_hessian.noalias() += d_tau * (s2 / s0 - mean * mean.transpose());
    }
  }
  return ev;
}

ChfCurve breslow_baseline(const FitData& fd, const Eigen::VectorXd& b,
                          TimeGridPtr grid, double epsilon) {
  const Eigen::VectorXd eta = fd.x * b;
  const double shift = eta.size() > 0 ? eta.maxCoeff() : 0.0;

  // Risk-set denominators per tie group, computed descending.
  std::vector<double> denom(fd.groups.size(), 0.0);
  double s0 = 0.0;
  for (std::size_t gi = fd.groups.size(); gi-- > 0;) {
    const auto [begin, end] = fd.groups[gi];
    for (Eigen::Index i = begin; i < end; ++i) s0 += std::exp(eta[i] - shift);
    denom[gi] = s0;
  }

  const std::size_t m1 = grid->interval_count();
  std::vector<double> values(m1, 0.0);
  double cum = 0.0;
  std::size_t gi = 0;
  for (std::size_t j = 0; j < m1; ++j) {
    const double hi =
        (j + 1 < m1) ? grid->time(j + 1) : grid->horizon();
    while (gi < fd.groups.size()) {
      const auto [begin, end] = fd.groups[gi];
      const double tau = fd.time[begin];
      if (tau >= hi && j + 1 < m1) break;
      double d_tau = 0.0;
      for (Eigen::Index i = begin; i < end; ++i) {
        if (fd.event[static_cast<std::size_t>(i)]) d_tau += 1.0;
      }
      if (d_tau > 0.0) cum += d_tau * std::exp(-shift) / denom[gi];
      ++gi;
    }
    values[j] = cum;
  }
  return ChfCurve(std::move(grid), std::move(values), epsilon);
}

}  // namespace

CoxModel::CoxModel(Eigen::VectorXd coefficients, ChfCurve baseline_chf)
    : coefficients_(std::move(coefficients)), baseline_(std::move(baseline_chf)) {
  if (!coefficients_.allFinite()) {
    throw std::invalid_argument("CoxModel: non-finite coefficients");
  }
}

double CoxModel::risk_score(const std::vector<double>& x) const {
  if (static_cast<Eigen::Index>(x.size()) != coefficients_.size()) {
    throw std::invalid_argument("CoxModel: feature dimension mismatch");
  }
  double eta = 0.0;
  for (Eigen::Index j = 0; j < coefficients_.size(); ++j) {
    eta += coefficients_[j] * x[static_cast<std::size_t>(j)];
  }
  return eta;
}

ChfCurve CoxModel::predict_chf(const std::vector<double>& x) const {
  const double scale = std::exp(risk_score(x));
  std::vector<double> values = baseline_.values();
  for (auto& v : values) v *= scale;
  return ChfCurve(baseline_.grid(), std::move(values), baseline_.epsilon());
}

double cox_log_likelihood(const Dataset& dataset, const Eigen::VectorXd& b) {
  return evaluate(FitData(dataset), b, false).loglik;
}

Eigen::VectorXd cox_gradient(const Dataset& dataset, const Eigen::VectorXd& b) {
  return evaluate(FitData(dataset), b, true).gradient;
}

CoxModel fit_cox(const Dataset& dataset, const CoxFitOptions& options) {
  if (dataset.event_count() == 0) {
    throw std::invalid_argument("fit_cox: dataset has no observed events");
  }
  const FitData fd(dataset);
  const auto d = static_cast<Eigen::Index>(dataset.dim());

  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  Evaluation ev = evaluate(fd, b, true);
  bool converged = ev.gradient.norm() <= options.newton_tol;

  for (int iter = 0; iter < options.max_iter && !converged; ++iter) {
    // Damped Newton ascent; the damping also covers flat directions from
    // constant or redundant one-hot covariates.
    Eigen::VectorXd step;
    double jitter = 0.0;
    const double base = std::max(ev.neg_hessian.trace() / std::max<double>(d, 1), 1e-30);
    for (int tries = 0; tries < 14; ++tries) {
      Eigen::MatrixXd h = ev.neg_hessian;
      h.diagonal().array() += (jitter == 0.0 ? 1e-10 * base : jitter);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(ev.gradient);
        if (step.allFinite() && step.dot(ev.gradient) > 0.0) break;
      }
      jitter = (jitter == 0.0) ? 1e-8 * base : jitter * 100.0;
      step.resize(0);
    }
    if (step.size() == 0) {
      throw FitError("fit_cox: cannot compute an ascent step", b);
    }

    // Step halving keeps the likelihood non-decreasing.
    double alpha = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = b + alpha * step;
      const double ll_trial = evaluate(fd, trial, false).loglik;
      if (ll_trial >= ev.loglik - 1e-12 * (1.0 + std::abs(ev.loglik))) {
        b = trial;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      throw FitError("fit_cox: line search failed to improve the likelihood", b);
    }
    if (b.norm() > options.separation_guard) {
      throw FitError("fit_cox: separation detected", b);
    }
    ev = evaluate(fd, b, true);
    converged = ev.gradient.norm() <= options.newton_tol;
  }
  if (!converged) {
    throw FitError("fit_cox: no convergence after max_iter iterations", b);
  }

  TimeGridPtr grid = build_time_grid(dataset);
  ChfCurve baseline = breslow_baseline(fd, b, std::move(grid), options.epsilon);
  return CoxModel(std::move(b), std::move(baseline));
}

std::string cox_to_json(const CoxModel& model) {
  nlohmann::ordered_json doc;
  doc["coefficients"] = std::vector<double>(
      model.coefficients().data(),
      model.coefficients().data() + model.coefficients().size());
  doc["grid"] = model.grid()->times();
  doc["baseline"] = model.baseline_chf().values();
  doc["horizon"] = model.grid()->horizon();
  doc["epsilon"] = model.baseline_chf().epsilon();
  return doc.dump(2);
}

CoxModel cox_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  std::vector<double> coef = doc.at("coefficients").get<std::vector<double>>();
  std::vector<double> times = doc.at("grid").get<std::vector<double>>();
  std::vector<double> baseline = doc.at("baseline").get<std::vector<double>>();
  const double horizon = doc.at("horizon").get<double>();
  const double epsilon = doc.at("epsilon").get<double>();
  if (times.empty()) throw std::invalid_argument("cox_from_json: empty grid");
  auto grid = std::make_shared<TimeGrid>(times, horizon - times.back());
  Eigen::VectorXd b(static_cast<Eigen::Index>(coef.size()));
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    b[i] = coef[static_cast<std::size_t>(i)];
  }
  return CoxModel(std::move(b), ChfCurve(std::move(grid), std::move(baseline), epsilon));
}

}  // namespace coxplain

#include "coxplain/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace coxplain {

void ExplanationProblem::validate() const {
  const auto n = neighbor_features.rows();
  if (weights.size() != n || q_upper.size() != n || r_lower.size() != n) {
    throw std::invalid_argument("ExplanationProblem: inconsistent sizes");
  }
  if (n == 0) throw std::invalid_argument("ExplanationProblem: empty problem");
  if (ridge < 0.0) throw std::invalid_argument("ExplanationProblem: ridge < 0");
  bool any_positive = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (weights[k] < -1e-15) {
      throw std::invalid_argument("ExplanationProblem: negative weight");
    }
    if (weights[k] > 0.0) any_positive = true;
    if (r_lower[k] > q_upper[k] + 1e-12) {
      throw std::invalid_argument("ExplanationProblem: r_lower > q_upper");
    }
  }
  if (!any_positive) {
    throw std::invalid_argument("ExplanationProblem: all weights zero");
  }
}

namespace {

// Internal form: minimize sum_k w_k |x_k.b - c_k| + ridge*|b|^2 + constant,
// with c_k the interval midpoint and constant sum_k w_k*(Q_k-R_k)/2.
struct WorkingProblem {
  Eigen::MatrixXd x;        // N x d
  Eigen::VectorXd w;        // N
  Eigen::VectorXd c;        // N midpoints
  Eigen::VectorXd halfgap;  // N, (Q-R)/2 >= 0
  double ridge = 0.0;
  double res_scale = 1.0;
  double sum_w = 0.0;
};

double objective_of(const WorkingProblem& p, const Eigen::VectorXd& b) {
  const Eigen::VectorXd r = p.x * b - p.c;
  double f = p.ridge * b.squaredNorm();
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    f += p.w[k] * (std::abs(r[k]) + p.halfgap[k]);
  }
  return f;
}

double smoothed_objective(const WorkingProblem& p, const Eigen::VectorXd& b,
                          double mu) {
  const Eigen::VectorXd r = p.x * b - p.c;
  double f = p.ridge * b.squaredNorm();
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    f += p.w[k] * std::sqrt(r[k] * r[k] + mu * mu);
  }
  return f;
}

// Damped Newton on the kink-smoothed objective; the second-order step is
// what copes with nearly parallel neighbor rows. Returns iterations used.
int newton_smoothed(const WorkingProblem& p, Eigen::VectorXd& b, double mu,
                    double grad_tol, int max_newton) {
  const Eigen::Index d = p.x.cols();
  int used = 0;
  for (; used < max_newton; ++used) {
    const Eigen::VectorXd r = p.x * b - p.c;
    Eigen::VectorXd grad = 2.0 * p.ridge * b;
    Eigen::MatrixXd hess = 2.0 * p.ridge * Eigen::MatrixXd::Identity(d, d);
    for (Eigen::Index k = 0; k < r.size(); ++k) {
      if (p.w[k] == 0.0) continue;
      const double denom = std::sqrt(r[k] * r[k] + mu * mu);
      grad += (p.w[k] * r[k] / denom) * p.x.row(k).transpose();
      const double curv = p.w[k] * mu * mu / (denom * denom * denom);
      hess.noalias() += curv * (p.x.row(k).transpose() * p.x.row(k));
    }
    if (grad.norm() <= grad_tol) break;

    Eigen::VectorXd step;
    double jitter = 0.0;
    const double base = hess.trace() / static_cast<double>(d);
    for (int tries = 0; tries < 12; ++tries) {
      Eigen::MatrixXd h = hess;
      if (jitter > 0.0) h.diagonal().array() += jitter;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(-grad);
        if (step.allFinite() && step.dot(grad) < 0.0) break;
      }
      jitter = (jitter == 0.0) ? 1e-12 * std::max(base, 1.0) : jitter * 100.0;
      step.resize(0);
    }
    if (step.size() == 0) break;

    const double f0 = smoothed_objective(p, b, mu);
    const double slope = grad.dot(step);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = b + alpha * step;
      if (smoothed_objective(p, trial, mu) <= f0 + 1e-4 * alpha * slope) {
        b = trial;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  return used;
}

// Greedy selection of linearly independent rows among near-zero residuals,
// ordered by |residual|, capped at d rows.
std::vector<Eigen::Index> detect_active(const WorkingProblem& p,
                                        const Eigen::VectorXd& r,
                                        double kappa_rel) {
  const Eigen::Index d = p.x.cols();
  std::vector<Eigen::Index> near;
  for (Eigen::Index k = 0; k < r.size(); ++k) {
    if (p.w[k] == 0.0) continue;
    const double kappa = kappa_rel * (1.0 + std::abs(p.c[k]) + p.res_scale);
    if (std::abs(r[k]) <= kappa) near.push_back(k);
  }
  std::sort(near.begin(), near.end(), [&](Eigen::Index a, Eigen::Index b2) {
    return std::abs(r[a]) < std::abs(r[b2]);
  });

  std::vector<Eigen::Index> chosen;
  Eigen::MatrixXd basis(d, 0);
  for (Eigen::Index k : near) {
    if (static_cast<Eigen::Index>(chosen.size()) >= d) break;
    Eigen::VectorXd v = p.x.row(k).transpose();
    const double norm0 = v.norm();
    if (norm0 <= 0.0) continue;
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      v -= basis.col(j).dot(v) * basis.col(j);
    }
    if (v.norm() > 1e-10 * norm0) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = v / v.norm();
      chosen.push_back(k);
    }
  }
  return chosen;
}

// Equality-constrained model solve:
//   min ridge*|b|^2 + v_in.b   s.t.  x_k.b = c_k for k in active.
// Returns false when the bordered system is numerically inconsistent, in
// which case 'descent' holds a null-space descent direction.
bool solve_eqp(const WorkingProblem& p, const std::vector<Eigen::Index>& active,
               const Eigen::VectorXd& v_in, Eigen::VectorXd& b_out,
               Eigen::VectorXd& mu_out, Eigen::VectorXd& descent) {
  const Eigen::Index d = p.x.cols();
  const auto a = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(d + a, d + a);
  kkt.topLeftCorner(d, d) = 2.0 * p.ridge * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd rhs(d + a);
  rhs.head(d) = -v_in;
  for (Eigen::Index i = 0; i < a; ++i) {
    kkt.block(d + i, 0, 1, d) = p.x.row(active[static_cast<std::size_t>(i)]);
    kkt.block(0, d + i, d, 1) =
        p.x.row(active[static_cast<std::size_t>(i)]).transpose();
    rhs[d + i] = p.c[active[static_cast<std::size_t>(i)]];
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(kkt);
  Eigen::VectorXd sol = cod.solve(rhs);
  const double resid = (kkt * sol - rhs).norm();
  const double scale = rhs.norm() + p.res_scale + 1.0;
  b_out = sol.head(d);
  mu_out = sol.tail(a);
  if (resid <= 1e-8 * scale) return true;

  // Inconsistent stationarity (ridge = 0 with too few active rows): move
  // along the steepest descent direction projected onto the constraint
  // null space.
  Eigen::VectorXd pdir = -v_in;
  if (a > 0) {
    Eigen::MatrixXd rt(d, a);
    for (Eigen::Index i = 0; i < a; ++i) {
      rt.col(i) = p.x.row(active[static_cast<std::size_t>(i)]).transpose();
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(rt);
    const Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(d, a);
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      pdir -= q.col(j).dot(pdir) * q.col(j);
    }
  }
  descent = pdir;
  return false;
}

// Box-constrained least squares over subgradient scales of the near-zero
// residual rows: minimize |u0 + sum_k w_k g_k x_k| with g in [-1,1]^a.
// Nearly parallel rows make first-order iterations useless here, so this is
// solved exactly: the unconstrained minimum-norm solution when it fits the
// box, exhaustive face enumeration when the set is small, and long-running
// coordinate descent as the degenerate-case fallback.
double solve_box_ls(const WorkingProblem& p,
                    const std::vector<Eigen::Index>& active,
                    const Eigen::VectorXd& u0, Eigen::VectorXd& g) {
  const auto a = static_cast<Eigen::Index>(active.size());
  const Eigen::Index d = p.x.cols();
  g = Eigen::VectorXd::Zero(a);
  if (a == 0) return u0.norm();

  Eigen::MatrixXd columns(d, a);
  for (Eigen::Index i = 0; i < a; ++i) {
    const Eigen::Index k = active[static_cast<std::size_t>(i)];
    columns.col(i) = p.w[k] * p.x.row(k).transpose();
  }

  {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(columns);
    const Eigen::VectorXd candidate = cod.solve(-u0);
    if ((candidate.array().abs() <= 1.0 + 1e-12).all()) {
      g = candidate.cwiseMin(1.0).cwiseMax(-1.0);
      return (u0 + columns * g).norm();
    }
  }

  if (a <= 8) {
    // Faces of the box: each coordinate free, at -1, or at +1.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_g = g;
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < a; ++i) total *= 3;
    std::vector<Eigen::Index> free_idx;
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t rem = code;
      free_idx.clear();
      Eigen::VectorXd trial = Eigen::VectorXd::Zero(a);
      Eigen::VectorXd shifted = u0;
      for (Eigen::Index i = 0; i < a; ++i) {
        const int state = static_cast<int>(rem % 3);
        rem /= 3;
        if (state == 0) {
          free_idx.push_back(i);
        } else {
          trial[i] = state == 1 ? 1.0 : -1.0;
          shifted += trial[i] * columns.col(i);
        }
      }
      if (!free_idx.empty()) {
        Eigen::MatrixXd sub(d, static_cast<Eigen::Index>(free_idx.size()));
        for (std::size_t j = 0; j < free_idx.size(); ++j) {
          sub.col(static_cast<Eigen::Index>(j)) = columns.col(free_idx[j]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sub);
        const Eigen::VectorXd sol = cod.solve(-shifted);
        if (!(sol.array().abs() <= 1.0 + 1e-10).all()) continue;
        for (std::size_t j = 0; j < free_idx.size(); ++j) {
          trial[free_idx[j]] =
              std::clamp(sol[static_cast<Eigen::Index>(j)], -1.0, 1.0);
        }
      }
      const double residual = (u0 + columns * trial).norm();
      if (residual < best) {
        best = residual;
        best_g = trial;
      }
    }
    g = best_g;
    return best;
  }

  // Degenerate wide kink sets: coordinate descent with a generous budget.
  Eigen::VectorXd u = u0;
  for (int sweep = 0; sweep < 50000; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index i = 0; i < a; ++i) {
      const double norm2 = columns.col(i).squaredNorm();
      if (norm2 <= 0.0) continue;
      const double g_old = g[i];
      u -= g_old * columns.col(i);
      const double g_new = std::clamp(-columns.col(i).dot(u) / norm2, -1.0, 1.0);
      u += g_new * columns.col(i);
      g[i] = g_new;
      max_change = std::max(max_change, std::abs(g_new - g_old));
    }
    if (max_change < 1e-16) break;
  }
  return u.norm();
}

// True when a candidate row is (numerically) independent of the active rows.
bool independent_of(const WorkingProblem& p,
                    const std::vector<Eigen::Index>& active,
                    Eigen::Index candidate) {
  Eigen::VectorXd v = p.x.row(candidate).transpose();
  const double norm0 = v.norm();
  if (norm0 <= 0.0) return false;
  Eigen::MatrixXd basis(p.x.cols(), 0);
  for (Eigen::Index k : active) {
    Eigen::VectorXd a = p.x.row(k).transpose();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      a -= basis.col(j).dot(a) * basis.col(j);
    }
    if (a.norm() > 1e-12) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = a / a.norm();
    }
  }
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    v -= basis.col(j).dot(v) * basis.col(j);
  }
  return v.norm() > 1e-10 * norm0;
}

// Active-set walk over the kink hyperplanes from a warm start; an exact
// method for the piecewise linear-quadratic objective. Every row carries a
// sign state: +-1 contributes its slope to the working model, 0 marks a row
// parked at a kink with an undetermined subgradient (duplicates of active
// rows). Released rows keep pulling with the sign of their multiplier, which
// is what makes the walk descend through degenerate vertices. Leaves b at
// the best objective found and returns the number of steps.
int polish(const WorkingProblem& p, Eigen::VectorXd& b, int max_steps) {
  const Eigen::Index n = p.x.rows();
  const Eigen::Index d = p.x.cols();
  Eigen::VectorXd best_b = b;
  double best_f = objective_of(p, b);
  int stalled = 0;
  bool reached_optimal = false;
  const double kink_width = 1e-9 * (1.0 + p.res_scale);

  Eigen::VectorXd r = p.x * b - p.c;
  std::vector<Eigen::Index> active = detect_active(p, r, 1e-9);
  std::vector<int> sign_state(static_cast<std::size_t>(n), 0);
  auto refresh_signs = [&] {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (std::abs(r[k]) > kink_width) {
        sign_state[static_cast<std::size_t>(k)] = r[k] > 0.0 ? 1 : -1;
      }
    }
  };
  refresh_signs();

  int step = 0;
  for (; step < max_steps; ++step) {
    Eigen::VectorXd v_in = Eigen::VectorXd::Zero(d);
    std::vector<char> in_active(static_cast<std::size_t>(n), 0);
    for (Eigen::Index k : active) in_active[static_cast<std::size_t>(k)] = 1;
    const std::vector<int> signs_used = sign_state;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (in_active[static_cast<std::size_t>(k)] || p.w[k] == 0.0) continue;
      const int s = signs_used[static_cast<std::size_t>(k)];
      if (s != 0) v_in += (s * p.w[k]) * p.x.row(k).transpose();
    }

    Eigen::VectorXd b_eq, mu_mult, descent;
    const bool consistent = solve_eqp(p, active, v_in, b_eq, mu_mult, descent);

    Eigen::VectorXd target;
    if (consistent) {
      target = b_eq;
    } else {
      if (descent.norm() <= 1e-12 * (1.0 + v_in.norm())) break;
      // A blocking kink must exist along a descent ray of a bounded problem.
      target = b + descent * (1e6 * (1.0 + b.norm()) / descent.norm());
    }

    // Ratio test: signed rows may not cross their kink.
    const Eigen::VectorXd r_tg = p.x * target - p.c;
    double alpha = 1.0;
    Eigen::Index blocker = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (in_active[static_cast<std::size_t>(k)] || p.w[k] == 0.0) continue;
      if (sign_state[static_cast<std::size_t>(k)] == 0) continue;
      const double r0 = r[k];
      const double r1 = r_tg[k];
      if (std::abs(r0) <= kink_width) continue;  // just released, may depart
      if ((r0 > 0.0 && r1 < 0.0) || (r0 < 0.0 && r1 > 0.0)) {
        const double a = r0 / (r0 - r1);
        if (a < alpha) {
          alpha = a;
          blocker = k;
        }
      }
    }

    b += alpha * (target - b);
    r = p.x * b - p.c;
    refresh_signs();
    const double f_now = objective_of(p, b);
    if (f_now < best_f - 1e-14 * (1.0 + std::abs(best_f))) {
      best_f = f_now;
      best_b = b;
      stalled = 0;
    } else if (++stalled > 40) {
      break;
    }

    if (blocker >= 0) {
      if (!independent_of(p, active, blocker)) {
        sign_state[static_cast<std::size_t>(blocker)] = 0;  // parked duplicate
        continue;
      }
      if (static_cast<Eigen::Index>(active.size()) >= d) {
        // Make room: drop the active row with the most saturated multiplier.
        std::size_t drop = 0;
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < active.size(); ++i) {
          const double wk = p.w[active[i]];
          const double excess =
              consistent ? std::abs(mu_mult[static_cast<Eigen::Index>(i)]) - wk
                         : 0.0;
          if (excess > worst) {
            worst = excess;
            drop = i;
          }
        }
        const Eigen::Index dropped = active[drop];
        sign_state[static_cast<std::size_t>(dropped)] =
            consistent && worst > 0.0
                ? (mu_mult[static_cast<Eigen::Index>(drop)] > 0.0 ? 1 : -1)
                : 0;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      }
      active.push_back(blocker);
      continue;
    }
    if (!consistent) continue;

    // Rows that slipped over their kink during the move invalidate the
    // model's stationarity; rebuild with the corrected signs.
    bool signs_consistent = true;
    for (Eigen::Index k = 0; k < n && signs_consistent; ++k) {
      if (in_active[static_cast<std::size_t>(k)] || p.w[k] == 0.0) continue;
      if (std::abs(r[k]) <= kink_width) continue;
      const int actual = r[k] > 0.0 ? 1 : -1;
      if (signs_used[static_cast<std::size_t>(k)] != actual) {
        signs_consistent = false;
      }
    }
    if (!signs_consistent) continue;

    // Dual feasibility of the fully stepped solution: |mu_k| <= w_k.
    double worst_excess = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      const double wk = p.w[active[i]];
      const double excess =
          std::abs(mu_mult[static_cast<Eigen::Index>(i)]) - wk;
      if (excess > worst_excess) {
        worst_excess = excess;
        worst_i = i;
      }
    }
    if (worst_excess <= 1e-10 * (1.0 + p.w.maxCoeff())) {
      ++step;
      reached_optimal = true;  // the stationary point beats noise-level f ties
      break;
    }
    // Release with the multiplier's sign so the row keeps its pull.
    const Eigen::Index released = active[worst_i];
    sign_state[static_cast<std::size_t>(released)] =
        mu_mult[static_cast<Eigen::Index>(worst_i)] > 0.0 ? 1 : -1;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst_i));
  }
  if (!reached_optimal &&
      objective_of(p, b) > best_f + 1e-12 * (1.0 + std::abs(best_f))) {
    b = best_b;
  }
  return step;
}

}  // namespace

ExplanationResult solve_robust(const ExplanationProblem& problem, double tol,
                               int max_iter) {
  problem.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("solve_robust: tol must be > 0");

  const Eigen::Index n = problem.neighbor_features.rows();
  const Eigen::Index d = problem.neighbor_features.cols();

  WorkingProblem p;
  p.x = problem.neighbor_features;
  p.w = problem.weights;
  p.c = 0.5 * (problem.q_upper + problem.r_lower);
  p.halfgap = 0.5 * (problem.q_upper - problem.r_lower).cwiseMax(0.0);
  p.ridge = problem.ridge;
  p.sum_w = p.w.sum();
  p.res_scale = 1e-12;
  for (Eigen::Index k = 0; k < n; ++k) {
    p.res_scale = std::max(p.res_scale, std::abs(p.c[k]) + p.halfgap[k]);
  }

  // Warm start on a pair of smoothing levels, then walk the exact kinks.
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  double grad_scale = 2.0 * p.ridge;
  for (Eigen::Index k = 0; k < n; ++k) grad_scale += p.w[k] * p.x.row(k).norm();
  const double gtol = 1e-11 * (1.0 + grad_scale);
  int iterations = 0;
  for (const double mu_rel : {1e-2, 1e-4, 1e-6}) {
    iterations += newton_smoothed(p, b, mu_rel * p.res_scale, gtol, 40);
  }
  const int polish_budget =
      std::min(std::max(300, static_cast<int>(3 * n)), max_iter);
  iterations += polish(p, b, polish_budget);

  // Certificate: minimum-norm subgradient with free scales on kink rows.
  ExplanationResult result;
  result.coefficients = b;
  result.iterations = iterations;

  const Eigen::VectorXd r = p.x * b - p.c;
  const double kink_width = 1e-9 * (1.0 + p.res_scale);
  std::vector<Eigen::Index> kink_rows;
  Eigen::VectorXd u0 = 2.0 * p.ridge * b;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (p.w[k] == 0.0) continue;
    if (std::abs(r[k]) <= kink_width) {
      kink_rows.push_back(k);
    } else {
      u0 += (r[k] > 0.0 ? p.w[k] : -p.w[k]) * p.x.row(k).transpose();
    }
  }
  Eigen::VectorXd g_kink;
  result.kkt_residual = solve_box_ls(p, kink_rows, u0, g_kink);

  result.slacks.resize(n);
  result.dual_alpha.resize(n);
  result.dual_beta.resize(n);
  std::size_t kink_pos = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    result.slacks[k] = std::abs(r[k]) + p.halfgap[k];
    double g;
    if (p.w[k] == 0.0) {
      g = 0.0;
    } else if (kink_pos < kink_rows.size() && kink_rows[kink_pos] == k) {
      g = g_kink[static_cast<Eigen::Index>(kink_pos)];
      ++kink_pos;
    } else {
      g = (r[k] > 0.0) ? 1.0 : -1.0;
    }
    result.dual_alpha[k] = p.w[k] * (1.0 - g) * 0.5;
    result.dual_beta[k] = p.w[k] * (1.0 + g) * 0.5;
  }
  result.objective = objective_of(p, b);

  if (problem.ridge == 0.0) {
    Eigen::MatrixXd act(static_cast<Eigen::Index>(kink_rows.size()), d);
    for (std::size_t i = 0; i < kink_rows.size(); ++i) {
      act.row(static_cast<Eigen::Index>(i)) = p.x.row(kink_rows[i]);
    }
    if (act.rows() < d) {
      result.non_unique = true;
    } else {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(act);
      qr.setThreshold(1e-10);
      result.non_unique = qr.rank() < d;
    }
  }

  if (result.kkt_residual > tol || iterations > max_iter) {
    throw SolverError("solve_robust: tolerance not reached", result);
  }
  return result;
}

ExplanationResult solve_precise(const Eigen::MatrixXd& neighbor_features,
                                const Eigen::VectorXd& weights,
                                const Eigen::MatrixXd& theta, double ridge,
                                double tol, int max_iter) {
  if (theta.rows() != neighbor_features.rows()) {
    throw std::invalid_argument("solve_precise: theta rows != neighbor rows");
  }
  if (theta.cols() == 0) {
    throw std::invalid_argument("solve_precise: theta has no intervals");
  }
  ExplanationProblem problem;
  problem.neighbor_features = neighbor_features;
  problem.weights = weights;
  problem.q_upper = theta.rowwise().maxCoeff();
  problem.r_lower = theta.rowwise().minCoeff();
  problem.ridge = ridge;
  return solve_robust(problem, tol, max_iter);
}

double dual_value(const ExplanationProblem& problem,
                  const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                  double feas_tol) {
  problem.validate();
  const Eigen::Index n = problem.neighbor_features.rows();
  if (alpha.size() != n || beta.size() != n) {
    throw std::invalid_argument("dual_value: multiplier size mismatch");
  }
  double max_violation = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    max_violation = std::max(max_violation, -alpha[k]);
    max_violation = std::max(max_violation, -beta[k]);
    max_violation =
        std::max(max_violation, alpha[k] + beta[k] - problem.weights[k]);
  }
  const Eigen::VectorXd stat =
      problem.neighbor_features.transpose() * (alpha - beta);
  max_violation = std::max(max_violation, stat.cwiseAbs().maxCoeff());
  if (max_violation > feas_tol) {
    throw std::invalid_argument(
        "dual_value: infeasible multipliers, max violation " +
        std::to_string(max_violation));
  }
  return problem.q_upper.dot(alpha) - problem.r_lower.dot(beta);
}

}  // namespace coxplain

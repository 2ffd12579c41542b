#include "projected_lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace decs::optim {
namespace {

struct CurvaturePair {
  Vector s;
  Vector y;
  double rho;  // 1 / (y^T s)
};

// Two-loop recursion: returns H * g for the inverse-Hessian approximation.
Vector apply_inverse_hessian(const std::deque<CurvaturePair>& pairs, const Vector& g) {
  Vector q = g;
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * pairs[k].s.dot(q);
    q.noalias() -= alpha[k] * pairs[k].y;
  }
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * pairs[k].y.dot(q);
    q.noalias() += (alpha[k] - beta) * pairs[k].s;
  }
  return q;
}

// Gradient with components that cannot move zeroed: fixed entries, and
// entries at the bound whose gradient pushes them further into it.
Vector projected_gradient(const Vector& x, const Vector& g,
                          const Eigen::Array<bool, Eigen::Dynamic, 1>& fixed) {
  Vector pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (fixed[i] || (x[i] <= 0.0 && g[i] > 0.0)) pg[i] = 0.0;
  }
  return pg;
}

}  // namespace

PqnResult minimize_nonnegative(const Objective& objective, Vector x0,
                               const Eigen::Array<bool, Eigen::Dynamic, 1>& fixed,
                               const PqnOptions& options) {
  const Eigen::Index n = x0.size();
  PqnResult result;
  result.x = x0.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (fixed[i]) result.x[i] = 0.0;
  }

  Vector g(n);
  result.f = objective(result.x, g);
  if (!std::isfinite(result.f)) return result;

  std::deque<CurvaturePair> pairs;
  Vector x_trial(n);
  Vector g_trial(n);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Vector pg = projected_gradient(result.x, g, fixed);
    result.pg_norm = pg.lpNorm<Eigen::Infinity>();
    if (result.pg_norm <= options.pg_tol) {
      result.converged = true;
      return result;
    }

    // pg already has the active set and fixed entries zeroed, so the
    // quasi-Newton step only moves free variables.
    Vector direction;
    bool steepest = pairs.empty();
    if (!steepest) {
      direction = -apply_inverse_hessian(pairs, pg);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (pg[i] == 0.0) direction[i] = 0.0;
      }
      if (!(direction.dot(pg) < 0.0)) steepest = true;
    }
    if (steepest) {
      pairs.clear();
      direction = -pg;
    }

    double step = steepest && iter == 0 ? std::min(1.0, 1.0 / pg.norm()) : 1.0;
    double f_trial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_trial = (result.x + step * direction).cwiseMax(0.0);
      f_trial = objective(x_trial, g_trial);
      if (std::isfinite(f_trial) &&
          f_trial <= result.f + options.armijo * g.dot(x_trial - result.x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (steepest) break;  // no progress possible along the gradient either
      pairs.clear();
      continue;
    }

    CurvaturePair pair{x_trial - result.x, g_trial - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-10 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }

    const double f_prev = result.f;
    result.x.swap(x_trial);
    g.swap(g_trial);
    result.f = f_trial;
    result.iterations = iter + 1;

    const double scale = std::max({std::abs(f_prev), std::abs(result.f), 1.0});
    if ((f_prev - result.f) <= options.f_rel_tol * scale) {
      result.pg_norm = projected_gradient(result.x, g, fixed).lpNorm<Eigen::Infinity>();
      result.converged = result.pg_norm <= options.pg_tol;
      return result;
    }
  }
  result.pg_norm = projected_gradient(result.x, g, fixed).lpNorm<Eigen::Infinity>();
  result.converged = result.pg_norm <= options.pg_tol;
  return result;
}

}  // namespace decs::optim

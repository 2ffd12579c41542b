#include "decs/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projected_lbfgs.hpp"

namespace decs::score {
namespace {

void require_data_shape(const Matrix& w, const Matrix& x_tilde, const char* what) {
  if (w.rows() != w.cols() || w.rows() != x_tilde.cols()) {
    throw InvalidInput(std::string(what) + ": W is " + std::to_string(w.rows()) + "x" +
                       std::to_string(w.cols()) + " but data has " +
                       std::to_string(x_tilde.cols()) + " columns");
  }
}

// Smooth least-squares part expressed through the Gram matrix G = X~^T X~ / n:
// (1/2n)||X~ - X~W||^2 = 1/2 tr(R^T G R) with R = I - W, gradient -G R.
class LeastSquares {
 public:
  explicit LeastSquares(const Matrix& x_tilde)
      : gram_(x_tilde.transpose() * x_tilde / static_cast<double>(x_tilde.rows())) {}

  int dim() const { return static_cast<int>(gram_.rows()); }

  double value_and_gradient(const Matrix& w, Matrix& gradient) const {
    Matrix residual = -w;
    residual.diagonal().array() += 1.0;
    gradient.noalias() = -(gram_ * residual);
    return -0.5 * residual.cwiseProduct(gradient).sum();
  }

 private:
  Matrix gram_;
};

// Augmented Lagrangian in the split parameterisation x = [vec(P); vec(Q)],
// W = P - Q, P, Q >= 0.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const LeastSquares& ls, double lambda) : ls_(ls), lambda_(lambda) {
    const int p = ls.dim();
    smooth_grad_.resize(p, p);
  }

  void set_penalty(double rho, double alpha) {
    rho_ = rho;
    alpha_ = alpha;
  }

  static Matrix weights(const Vector& x, int p) {
    const Eigen::Index pp = static_cast<Eigen::Index>(p) * p;
    return Eigen::Map<const Matrix>(x.data(), p, p) - Eigen::Map<const Matrix>(x.data() + pp, p, p);
  }

  double operator()(const Vector& x, Vector& gradient) {
    const int p = ls_.dim();
    const Eigen::Index pp = static_cast<Eigen::Index>(p) * p;
    const Matrix w = weights(x, p);
    const double smooth = ls_.value_and_gradient(w, smooth_grad_);
    linalg::AcyclicityEval h;
    try {
      h = linalg::acyclicity(w);
    } catch (const OverflowError&) {
      return std::numeric_limits<double>::infinity();
    }
    const double l1 = x.sum();
    const double value = smooth + lambda_ * l1 + 0.5 * rho_ * h.value * h.value + alpha_ * h.value;

    const Matrix grad_w = smooth_grad_ + (rho_ * h.value + alpha_) * h.gradient;
    gradient.resize(2 * pp);
    Eigen::Map<Matrix>(gradient.data(), p, p) = grad_w.array() + lambda_;
    Eigen::Map<Matrix>(gradient.data() + pp, p, p) = -grad_w.array() + lambda_;
    return value;
  }

 private:
  const LeastSquares& ls_;
  double lambda_;
  double rho_ = 1.0;
  double alpha_ = 0.0;
  Matrix smooth_grad_;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

void ScoreConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("config 'lambda': must be >= 0");
  if (!(rho_init > 0.0)) throw InvalidInput("config 'rho_init': must be > 0");
  if (!(rho_max > rho_init)) throw InvalidInput("config 'rho_max': must exceed rho_init");
  if (!(h_tol > 0.0)) throw InvalidInput("config 'h_tol': must be > 0");
  if (!(progress_ratio > 0.0 && progress_ratio < 1.0)) {
    throw InvalidInput("config 'progress_ratio': must lie in (0, 1)");
  }
  if (max_outer < 1) throw InvalidInput("config 'max_outer': must be >= 1");
  if (!(inner_tol > 0.0)) throw InvalidInput("config 'inner_tol': must be > 0");
  if (inner_max_iter < 1) throw InvalidInput("config 'inner_max_iter': must be >= 1");
  if (!(edge_threshold >= 0.0)) throw InvalidInput("config 'edge_threshold': must be >= 0");
}

double score_value(const Matrix& w, const Matrix& x_tilde, double lambda) {
  require_data_shape(w, x_tilde, "score_value");
  const double n = static_cast<double>(x_tilde.rows());
  return (x_tilde - x_tilde * w).squaredNorm() / (2.0 * n) + lambda * w.cwiseAbs().sum();
}

Matrix smooth_gradient(const Matrix& w, const Matrix& x_tilde) {
  require_data_shape(w, x_tilde, "smooth_gradient");
  const double n = static_cast<double>(x_tilde.rows());
  Matrix g = -(x_tilde.transpose() * (x_tilde - x_tilde * w)) / n;
  g.diagonal().setZero();
  return g;
}

Matrix adjusted_data(const Matrix& x, bool use_trim) {
  if (!use_trim) return x;
  return linalg::trim_transform(x).x_tilde;
}

double default_lambda(const Matrix& x_tilde) {
  const Eigen::Index n = x_tilde.rows();
  const Eigen::Index p = x_tilde.cols();
  if (n < 2 || p < 2) throw InvalidInput("default_lambda: need n >= 2 and p >= 2");
  std::vector<double> sds;
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto col = x_tilde.col(j).array();
    const double mean = col.mean();
    sds.push_back(std::sqrt((col - mean).square().sum() / static_cast<double>(n - 1)));
  }
  // sigma_hat enters squared: the score's gradient is quadratic in the data
  // scale, so this keeps the estimate invariant under X -> cX.
  const double sigma_hat = median(sds);
  return sigma_hat * sigma_hat * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

double lambda_max(const Matrix& x_tilde) {
  Matrix gram = x_tilde.transpose() * x_tilde / static_cast<double>(x_tilde.rows());
  gram.diagonal().setZero();
  return gram.cwiseAbs().maxCoeff();
}

std::vector<double> default_lambda_grid(const Matrix& x_tilde, int points) {
  if (points < 1) throw InvalidInput("default_lambda_grid: need at least one point");
  const double top = lambda_max(x_tilde);
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) {
    const double frac = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
    grid.push_back(top * std::pow(10.0, -3.0 * frac));
  }
  return grid;
}

int repair_acyclic(Matrix& w) {
  int removed = 0;
  while (true) {
    const auto cycle = model::find_cycle(model::WeightedAdjacency::with_zero_diagonal(w), 0.0);
    if (!cycle) return removed;
    int from = -1;
    int to = -1;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cycle->size(); ++k) {
      const int a = (*cycle)[k];
      const int b = (*cycle)[(k + 1) % cycle->size()];
      if (std::abs(w(a, b)) < smallest) {
        smallest = std::abs(w(a, b));
        from = a;
        to = b;
      }
    }
    w(from, to) = 0.0;
    ++removed;
  }
}

SolveReport solve_adjusted(const Matrix& x_tilde, const ScoreConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Eigen::Index n = x_tilde.rows();
  const int p = static_cast<int>(x_tilde.cols());
  if (n < 2 || p < 2) throw InvalidInput("solve: need n >= 2 and p >= 2");
  if (!x_tilde.allFinite()) throw InvalidInput("solve: data contains non-finite values");

  const LeastSquares ls(x_tilde);
  AugmentedLagrangian lagrangian(ls, cfg.lambda);
  const optim::Objective objective = [&](const Vector& x, Vector& g) { return lagrangian(x, g); };

  const Eigen::Index pp = static_cast<Eigen::Index>(p) * p;
  Eigen::Array<bool, Eigen::Dynamic, 1> fixed = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(2 * pp, false);
  for (int i = 0; i < p; ++i) {
    fixed[i * p + i] = true;
    fixed[pp + i * p + i] = true;
  }
  optim::PqnOptions options;
  options.pg_tol = cfg.inner_tol;
  options.max_iter = cfg.inner_max_iter;

  SolveReport report;
  report.lambda_used = cfg.lambda;

  Vector x = Vector::Zero(2 * pp);
  double rho = cfg.rho_init;
  double alpha = cfg.alpha_init;
  double h_prev = std::numeric_limits<double>::infinity();
  Vector best_x = x;
  double best_h = std::numeric_limits<double>::infinity();

  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    Vector x_new;
    double h_new = std::numeric_limits<double>::infinity();
    while (rho < cfg.rho_max) {
      lagrangian.set_penalty(rho, alpha);
      optim::PqnResult inner = optim::minimize_nonnegative(objective, x, fixed, options);
      if (!std::isfinite(inner.f) || !inner.x.allFinite()) {
        throw SolverDiverged("solve: inner solver produced a non-finite objective at rho = " +
                                 std::to_string(rho),
                             report.trace);
      }
      x_new = std::move(inner.x);
      h_new = linalg::acyclicity_value(AugmentedLagrangian::weights(x_new, p));
      if (h_new < best_h) {
        best_h = h_new;
        best_x = x_new;
      }
      if (h_new > cfg.progress_ratio * h_prev) {
        rho *= 10.0;
      } else {
        break;
      }
    }
    if (x_new.size() == 0 || h_new > cfg.progress_ratio * h_prev) break;  // rho exhausted

    x = std::move(x_new);
    h_prev = h_new;
    alpha += rho * h_new;
    const Matrix w = AugmentedLagrangian::weights(x, p);
    report.trace.push_back({outer, score_value(w, x_tilde, cfg.lambda), h_new, rho, alpha});
    if (h_new <= cfg.h_tol) {
      report.converged = true;
      break;
    }
    if (rho >= cfg.rho_max) break;
  }

  const Vector& final_x = report.converged ? x : best_x;
  Matrix w = AugmentedLagrangian::weights(final_x, p);
  report.w_raw = w;
  w = (w.array().abs() <= cfg.edge_threshold).select(0.0, w);
  w.diagonal().setZero();
  report.repaired_edges = repair_acyclic(w);
  report.w_hat = model::WeightedAdjacency(std::move(w));
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

SolveReport solve_decs(const model::Dataset& data, const ScoreConfig& cfg) {
  cfg.validate();
  if (data.rows() < 2 || data.cols() < 2) {
    throw InvalidInput("solve_decs: need at least 2 rows and 2 columns");
  }
  return solve_adjusted(adjusted_data(data.values(), cfg.use_trim), cfg);
}

Vector neighbourhood_lasso_oracle(const Matrix& x_tilde, int target,
                                  const std::vector<int>& allowed, double lambda, double tol,
                                  int max_sweeps) {
  const Eigen::Index p = x_tilde.cols();
  const double n = static_cast<double>(x_tilde.rows());
  if (target < 0 || target >= p) throw InvalidInput("lasso oracle: target out of range");
  for (int j : allowed) {
    if (j == target) throw InvalidInput("lasso oracle: target in its own neighbourhood");
    if (j < 0 || j >= p) throw InvalidInput("lasso oracle: neighbour out of range");
  }

  Vector beta = Vector::Zero(p);
  Vector residual = x_tilde.col(target);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int j : allowed) {
      const auto col = x_tilde.col(j);
      const double curvature = col.squaredNorm() / n;
      if (curvature == 0.0) continue;
      const double rho = col.dot(residual) / n + curvature * beta[j];
      const double shrunk = std::copysign(std::max(std::abs(rho) - lambda, 0.0), rho) / curvature;
      const double delta = shrunk - beta[j];
      if (delta != 0.0) {
        residual -= delta * col;
        beta[j] = shrunk;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change <= tol) break;
  }
  return beta;
}

}  // namespace decs::score

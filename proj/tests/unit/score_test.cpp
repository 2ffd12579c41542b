#include <gtest/gtest.h>

#include <cmath>

#include "decs/error.hpp"
#include "decs/linalg.hpp"
#include "decs/score.hpp"
#include "decs/simulate.hpp"
#include "unit/brute_force_dag.hpp"

namespace {

using decs::Matrix;
using decs::Rng;
using decs::Vector;
namespace model = decs::model;
namespace score = decs::score;
namespace simulate = decs::simulate;

Matrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

model::Dataset chain_data(int p, double weight, int n, double sigma, std::uint64_t seed) {
  model::WeightedAdjacency w(p);
  for (int i = 0; i + 1 < p; ++i) w.set(i, i + 1, weight);
  Rng rng(seed);
  return simulate::sample_on(model::Dag(w), Matrix::Zero(p, 0), simulate::NoiseFamily::kGaussian,
                             sigma, n, 1.0, rng)
      .data;
}

double smooth_part(const Matrix& w, const Matrix& x) { return score::score_value(w, x, 0.0); }

TEST(ScoreValue, ZeroWeights) {
  const Matrix x = gaussian_matrix(7, 3, 1);
  EXPECT_NEAR(score::score_value(Matrix::Zero(3, 3), x, 0.4), x.squaredNorm() / 14.0, 1e-14);
}

TEST(ScoreValue, ExactFitIsZero) {
  // Column 2 is exactly 3 * column 1.
  Matrix x(4, 2);
  x << 1, 3, -2, -6, 0.5, 1.5, 4, 12;
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 3.0;
  EXPECT_EQ(score::score_value(w, Matrix::Zero(4, 2), 0.0), 0.0);
  // Column 1 leaves a residual, column 2 is reproduced exactly.
  EXPECT_NEAR(score::score_value(w, x, 0.0), x.col(0).squaredNorm() / 8.0, 1e-12);
}

TEST(ScoreValue, HandArithmetic) {
  Matrix x(1, 2);
  x << 1, 2;
  Matrix w = Matrix::Zero(2, 2);
  w(0, 1) = 0.5;
  // Residuals (1, 2 - 0.5): (1 + 2.25) / 2 + 0.1 * 0.5.
  EXPECT_NEAR(score::score_value(w, x, 0.1), 1.675, 1e-15);
}

TEST(ScoreValue, DimensionMismatch) {
  EXPECT_THROW(score::score_value(Matrix::Zero(3, 3), Matrix::Zero(5, 2), 0.1), decs::InvalidInput);
  EXPECT_THROW(score::smooth_gradient(Matrix::Zero(2, 2), Matrix::Zero(5, 3)), decs::InvalidInput);
}

TEST(SmoothGradient, ZeroDataAndClosedForm) {
  EXPECT_EQ(score::smooth_gradient(Matrix::Zero(3, 3), Matrix::Zero(5, 3)).cwiseAbs().maxCoeff(), 0.0);
  const Matrix x = gaussian_matrix(9, 4, 2);
  Matrix expected = -x.transpose() * x / 9.0;
  expected.diagonal().setZero();
  EXPECT_LT((score::smooth_gradient(Matrix::Zero(4, 4), x) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SmoothGradient, MatchesCentralDifferences) {
  const double step = 1e-5;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int p = 2 + static_cast<int>(seed % 9);
    const Matrix x = gaussian_matrix(20, p, 300 + seed);
    Matrix w = gaussian_matrix(p, p, 900 + seed) * 0.3;
    w.diagonal().setZero();
    const Matrix g = score::smooth_gradient(w, x);
    Matrix fd = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        if (i == j) continue;
        Matrix plus = w;
        Matrix minus = w;
        plus(i, j) += step;
        minus(i, j) -= step;
        fd(i, j) = (smooth_part(plus, x) - smooth_part(minus, x)) / (2 * step);
      }
    }
    EXPECT_LT((g - fd).norm() / fd.norm(), 1e-6) << "seed " << seed;
    EXPECT_EQ(g.diagonal().cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(LassoOracle, TrivialCases) {
  const Matrix x = gaussian_matrix(30, 4, 3);
  EXPECT_EQ(score::neighbourhood_lasso_oracle(x, 0, {1, 2, 3}, 1e6).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(score::neighbourhood_lasso_oracle(x, 0, {}, 0.01).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(score::neighbourhood_lasso_oracle(x, 0, {0}, 0.1), decs::InvalidInput);
}

TEST(LassoOracle, ScalarSoftThreshold) {
  Matrix x(1, 2);
  x << 1, 2;
  const Vector beta = score::neighbourhood_lasso_oracle(x, 1, {0}, 0.5);
  EXPECT_NEAR(beta[0], 1.5, 1e-15);
  EXPECT_EQ(beta[1], 0.0);
}

TEST(LassoOracle, SatisfiesKkt) {
  const Matrix x = gaussian_matrix(60, 6, 4);
  const double lambda = 0.1;
  const Vector beta = score::neighbourhood_lasso_oracle(x, 5, {0, 1, 2, 3, 4}, lambda);
  const Vector grad = -x.transpose() * (x.col(5) - x * beta) / 60.0;
  for (int j = 0; j < 5; ++j) {
    if (beta[j] != 0.0) {
      EXPECT_NEAR(grad[j], -lambda * std::copysign(1.0, beta[j]), 1e-9);
    } else {
      EXPECT_LE(std::abs(grad[j]), lambda + 1e-9);
    }
  }
}

TEST(Lambda, GridAndMax) {
  const Matrix x = gaussian_matrix(50, 5, 6);
  Matrix gram = x.transpose() * x / 50.0;
  gram.diagonal().setZero();
  EXPECT_DOUBLE_EQ(score::lambda_max(x), gram.cwiseAbs().maxCoeff());
  const auto grid = score::default_lambda_grid(x);
  ASSERT_EQ(grid.size(), 8u);
  EXPECT_DOUBLE_EQ(grid.front(), score::lambda_max(x));
  EXPECT_NEAR(grid.back(), 1e-3 * score::lambda_max(x), 1e-15);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    EXPECT_NEAR(grid[k - 1] / grid[k], std::pow(10.0, 3.0 / 7.0), 1e-9);
  }
}

TEST(Lambda, DefaultIsScaleConsistent) {
  const Matrix x = gaussian_matrix(80, 6, 7);
  // Scaling X by c scales the score by c^2, so the equivalent lambda must too.
  EXPECT_NEAR(score::default_lambda(3.0 * x), 9.0 * score::default_lambda(x), 1e-12);
  std::vector<double> sds;
  for (int j = 0; j < 6; ++j) {
    const Vector c = x.col(j).array() - x.col(j).mean();
    sds.push_back(std::sqrt(c.squaredNorm() / 79.0));
  }
  std::sort(sds.begin(), sds.end());
  const double median = 0.5 * (sds[2] + sds[3]);
  EXPECT_NEAR(score::default_lambda(x), median * median * std::sqrt(std::log(6.0) / 80.0), 1e-14);
}

TEST(Config, Validation) {
  score::ScoreConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.progress_ratio = 1.0;
  EXPECT_THROW(cfg.validate(), decs::InvalidInput);
  cfg = {};
  cfg.rho_max = cfg.rho_init;
  EXPECT_THROW(cfg.validate(), decs::InvalidInput);
  cfg = {};
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), decs::InvalidInput);
}

TEST(Repair, RemovesWeakestEdgeOnCycle) {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = 1.0;
  w(1, 2) = 0.9;
  w(2, 0) = -0.35;
  EXPECT_EQ(score::repair_acyclic(w), 1);
  EXPECT_EQ(w(2, 0), 0.0);
  EXPECT_EQ(w(0, 1), 1.0);
  EXPECT_EQ(score::repair_acyclic(w), 0);
}

TEST(Solve, PureNoiseLargeLambdaIsEmpty) {
  Rng rng(8);
  const auto inst = simulate::sample_on(model::Dag(model::WeightedAdjacency(5)), Matrix::Zero(5, 0),
                                        simulate::NoiseFamily::kGaussian, 1.0, 500, 1.0, rng);
  score::ScoreConfig cfg;
  cfg.lambda = 0.3;
  const auto report = score::solve_decs(inst.data, cfg);
  EXPECT_EQ(report.w_hat.edge_count(), 0);
  EXPECT_TRUE(report.converged);
  // The lasso oracle agrees: every neighbourhood regression is empty.
  const Matrix xt = score::adjusted_data(inst.data.values(), true);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> others;
    for (int j = 0; j < 5; ++j) {
      if (j != i) others.push_back(j);
    }
    EXPECT_EQ(score::neighbourhood_lasso_oracle(xt, i, others, 0.3).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Solve, TwoNodeChainUnadjusted) {
  const auto data = chain_data(2, 1.5, 1000, 0.5, 12);
  score::ScoreConfig cfg;
  cfg.lambda = 0.05;
  cfg.use_trim = false;
  const auto report = score::solve_decs(data, cfg);
  EXPECT_EQ(report.w_hat.edge_count(), 1);
  ASSERT_NE(report.w_hat(0, 1), 0.0);
  // With one edge h is identically zero, so the forward weight is the lasso
  // coefficient of X2 on X1. Lasso shrinkage is lambda / Var(X1), about 0.2
  // here, so the ordinary regression slope is only a loose reference.
  const Vector lasso = score::neighbourhood_lasso_oracle(data.values(), 1, {0}, cfg.lambda);
  EXPECT_NEAR(report.w_hat(0, 1), lasso[0], 1e-2);
  const Matrix& x = data.values();
  EXPECT_NEAR(x.col(0).dot(x.col(1)) / x.col(0).squaredNorm(), 1.5, 0.15);
}

TEST(Solve, ThreeNodeChainMatchesBruteForce) {
  const auto data = chain_data(3, 1.0, 2000, 1.0, 13);
  for (bool trim : {false, true}) {
    score::ScoreConfig cfg;
    cfg.lambda = 0.05;
    cfg.use_trim = trim;
    const auto report = score::solve_decs(data, cfg);
    const Matrix xt = score::adjusted_data(data.values(), trim);
    const auto oracle = decs_test::brute_force_dag(xt, cfg.lambda);
    EXPECT_EQ(oracle.structures, 25);
    const double solver = decs_test::penalised_score(xt, report.w_raw, cfg.lambda);
    EXPECT_LE(std::abs(solver - oracle.score), 0.02 * oracle.score) << "trim " << trim;
    if (!trim) {
      model::WeightedAdjacency chain(3);
      chain.set(0, 1, 1.0);
      chain.set(1, 2, 1.0);
      EXPECT_EQ(model::skeleton_of(report.w_hat), model::skeleton_of(chain));
      EXPECT_EQ(model::skeleton_of(report.w_hat),
                model::skeleton_of(model::WeightedAdjacency(oracle.weights), cfg.edge_threshold));
    }
  }
}

TEST(Solve, ReportInvariants) {
  simulate::SemSpec spec;
  spec.p = 8;
  spec.graph = simulate::ErGraph{8.0};
  spec.seed = 3;
  const auto inst = simulate::sample_sem(spec);
  score::ScoreConfig cfg;
  cfg.lambda = score::default_lambda(score::adjusted_data(inst.data.values(), true));
  const auto report = score::solve_decs(inst.data, cfg);
  ASSERT_FALSE(report.trace.empty());
  EXPECT_TRUE(model::is_acyclic(report.w_hat));
  EXPECT_EQ(report.lambda_used, cfg.lambda);
  if (report.converged) EXPECT_LE(report.trace.back().h_value, cfg.h_tol);
  for (std::size_t k = 1; k < report.trace.size(); ++k) {
    const auto& prev = report.trace[k - 1];
    const auto& cur = report.trace[k];
    EXPECT_LE(cur.h_value, prev.h_value);
    // Either h dropped by the progress ratio or rho grew.
    EXPECT_TRUE(cur.h_value <= cfg.progress_ratio * prev.h_value || cur.rho > prev.rho);
  }
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (report.w_hat(i, j) != 0.0) {
        EXPECT_GT(std::abs(report.w_hat(i, j)), cfg.edge_threshold);
      }
    }
  }
}

TEST(Solve, HugeLambdaIsEmptyAndDataChecked) {
  const auto data = chain_data(3, 1.0, 50, 1.0, 1);
  score::ScoreConfig cfg;
  cfg.lambda = 1e6;
  EXPECT_EQ(score::solve_decs(data, cfg).w_hat.edge_count(), 0);
  const model::Dataset tiny(Matrix::Ones(1, 3));
  EXPECT_THROW(score::solve_decs(tiny, cfg), decs::InvalidInput);
}

TEST(Solve, NonConvergenceReturnsBestIterate) {
  const auto data = chain_data(4, 1.0, 200, 1.0, 2);
  score::ScoreConfig cfg;
  cfg.lambda = 0.01;
  cfg.use_trim = false;
  cfg.rho_max = 10.0;
  const auto report = score::solve_decs(data, cfg);
  EXPECT_FALSE(report.converged);
  EXPECT_TRUE(model::is_acyclic(report.w_hat));
}

TEST(CrossValidation, SingletonGrid) {
  const auto data = chain_data(3, 1.0, 60, 1.0, 4);
  const auto cv = score::cross_validate_lambda(data, {0.2}, 3, score::ScoreConfig{});
  EXPECT_EQ(cv.best_lambda, 0.2);
  ASSERT_EQ(cv.fold_losses.size(), 1u);
  EXPECT_EQ(cv.fold_losses[0].size(), 3u);
}

TEST(CrossValidation, PureNoisePrefersLargerLambda) {
  Rng rng(9);
  const auto inst = simulate::sample_on(model::Dag(model::WeightedAdjacency(5)), Matrix::Zero(5, 0),
                                        simulate::NoiseFamily::kGaussian, 1.0, 300, 1.0, rng);
  const auto cv = score::cross_validate_lambda(inst.data, {0.01, 1.0}, 5, score::ScoreConfig{});
  EXPECT_NEAR(cv.mean_losses[0], cv.mean_losses[1], 0.05 * cv.mean_losses[1]);
  EXPECT_EQ(cv.best_lambda, 1.0);
}

TEST(CrossValidation, StrongSignalPrefersSmallerLambda) {
  const auto data = chain_data(3, 1.0, 2000, 1.0, 13);
  // Untrimmed: at p = 3 the median cap flattens two of three directions and
  // the chain falls under the edge threshold at either lambda.
  score::ScoreConfig cfg;
  cfg.use_trim = false;
  const auto cv = score::cross_validate_lambda(data, {0.05, 5.0}, 5, cfg);
  EXPECT_LT(cv.mean_losses[0], cv.mean_losses[1]);
  EXPECT_EQ(cv.best_lambda, 0.05);
}

TEST(CrossValidation, JobsDoNotChangeResults) {
  const auto data = chain_data(4, 1.0, 120, 1.0, 5);
  const std::vector<double> grid{0.5, 0.05, 0.005};
  const auto serial = score::cross_validate_lambda(data, grid, 4, score::ScoreConfig{}, 1);
  const auto parallel = score::cross_validate_lambda(data, grid, 4, score::ScoreConfig{}, 3);
  EXPECT_EQ(serial.fold_losses, parallel.fold_losses);
  EXPECT_EQ(serial.best_lambda, parallel.best_lambda);
}

TEST(CrossValidation, Errors) {
  const auto data = chain_data(3, 1.0, 5, 1.0, 6);
  EXPECT_THROW(score::cross_validate_lambda(data, {0.1}, 1, score::ScoreConfig{}), decs::InvalidInput);
  EXPECT_THROW(score::cross_validate_lambda(data, {}, 2, score::ScoreConfig{}), decs::InvalidInput);
  EXPECT_THROW(score::cross_validate_lambda(data, {0.1}, 3, score::ScoreConfig{}), decs::InvalidInput);
  EXPECT_THROW(score::cross_validate_lambda(data, {-0.1}, 2, score::ScoreConfig{}), decs::InvalidInput);
}

TEST(ReportJson, RoundTrip) {
  const auto data = chain_data(3, 1.0, 100, 1.0, 7);
  score::ScoreConfig cfg;
  cfg.lambda = 0.05;
  cfg.use_trim = false;
  const auto report = score::solve_decs(data, cfg);
  const auto back = score::solve_report_from_json(score::to_json(report, "abc"));
  EXPECT_EQ(back.w_hat.weights(), report.w_hat.weights());
  EXPECT_EQ(back.w_raw, report.w_raw);
  EXPECT_EQ(back.lambda_used, report.lambda_used);
  EXPECT_EQ(back.converged, report.converged);
  ASSERT_EQ(back.trace.size(), report.trace.size());
  EXPECT_EQ(back.trace.back().h_value, report.trace.back().h_value);
  EXPECT_THROW(score::solve_report_from_json("{}"), decs::InvalidInput);
}

}  // namespace

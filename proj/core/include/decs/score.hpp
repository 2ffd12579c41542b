#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "decs/error.hpp"
#include "decs/linalg.hpp"
#include "decs/model.hpp"

namespace decs::score {

/// Solver configuration. Defaults follow the standard augmented-Lagrangian
/// schedule for trace-exponential acyclicity constraints.
struct ScoreConfig {
  double lambda = 0.1;
  bool use_trim = true;  // false: unadjusted baseline on the raw data
  double rho_init = 1.0;
  double rho_max = 1e16;
  double alpha_init = 0.0;
  double h_tol = 1e-8;
  double progress_ratio = 0.25;
  int max_outer = 100;
  double inner_tol = 1e-6;
  int inner_max_iter = 500;
  double edge_threshold = 0.3;

  void validate() const;
};

struct TraceRecord {
  int outer_iter = 0;
  double score = 0.0;    // penalised least-squares score of the iterate
  double h_value = 0.0;  // acyclicity of the iterate
  double rho = 0.0;
  double alpha = 0.0;    // multiplier after the update
};

struct SolveReport {
  model::WeightedAdjacency w_hat;  // thresholded and repaired estimate
  Matrix w_raw;                    // optimiser output before thresholding
  double lambda_used = 0.0;
  std::vector<TraceRecord> trace;
  bool converged = false;
  int repaired_edges = 0;  // edges removed to break residual cycles
  std::chrono::duration<double> wall_time{};
};

/// The inner solver produced a non-finite objective.
class SolverDiverged : public Error {
 public:
  SolverDiverged(const std::string& what, std::vector<TraceRecord> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  std::vector<TraceRecord> trace_;
};

/// (1/2n) ||X~ - X~ W||_F^2 + lambda ||W||_1.
double score_value(const Matrix& w, const Matrix& x_tilde, double lambda);

/// -(1/n) X~^T (X~ - X~ W) with the diagonal set to zero.
Matrix smooth_gradient(const Matrix& w, const Matrix& x_tilde);

/// The data the score is evaluated on: the trimmed matrix, or x itself.
Matrix adjusted_data(const Matrix& x, bool use_trim);

/// Plug-in lambda = sigma_hat^2 * sqrt(log p / n), sigma_hat the median column
/// standard deviation of x_tilde.
double default_lambda(const Matrix& x_tilde);

/// Largest off-diagonal |X~^T X~ / n|: the smallest lambda at which W = 0 is
/// stationary.
double lambda_max(const Matrix& x_tilde);

/// `points` log-spaced values from lambda_max down to 1e-3 * lambda_max,
/// descending.
std::vector<double> default_lambda_grid(const Matrix& x_tilde, int points = 8);

/// Minimises the score on already-adjusted data subject to h(W) = 0 with the
/// augmented Lagrangian method, then thresholds and repairs residual cycles.
SolveReport solve_adjusted(const Matrix& x_tilde, const ScoreConfig& cfg);

/// Full estimator: adjust (when cfg.use_trim) then solve_adjusted.
SolveReport solve_decs(const model::Dataset& data, const ScoreConfig& cfg);

/// Removes the smallest-magnitude edge on some directed cycle until the
/// support is acyclic. Returns the number of edges removed.
int repair_acyclic(Matrix& w);

struct CvResult {
  double best_lambda = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_losses;               // per grid entry
  std::vector<std::vector<double>> fold_losses;  // [grid][fold]
};

/// k-fold cross-validation of lambda on adjusted data. Each training fold is
/// trimmed on its own and validation rows are mapped through the training
/// fold's transform (SpectralTransform::apply_to_rows). Ties go to the larger
/// lambda. `jobs` > 1 evaluates folds concurrently; results do not depend on it.
CvResult cross_validate_lambda(const model::Dataset& data, const std::vector<double>& grid,
                               int folds, const ScoreConfig& cfg, int jobs = 1);

/// Coordinate-descent lasso of column `target` of x_tilde on the columns in
/// `allowed`: argmin (1/2n)||x_i - X w||^2 + lambda ||w||_1 with supp(w) in
/// `allowed`. Returns a p-vector.
Vector neighbourhood_lasso_oracle(const Matrix& x_tilde, int target,
                                  const std::vector<int>& allowed, double lambda,
                                  double tol = 1e-12, int max_sweeps = 100000);

// report.json round trip. The matrix is stored as {"rows", "cols", "data"}
// with data in row-major order.
std::string to_json(const SolveReport& report, const std::string& data_hash = {});
SolveReport solve_report_from_json(std::string_view text);

}  // namespace decs::score

#include <algorithm>
#include <atomic>
#include <thread>

#include "decs/score.hpp"

namespace decs::score {
namespace {

struct Fold {
  Matrix train;
  Matrix validation;
};

// Contiguous blocks of rows; the first (n % k) folds get one extra row.
std::vector<Fold> make_folds(const Matrix& x, int k) {
  const Eigen::Index n = x.rows();
  std::vector<Fold> folds;
  Eigen::Index begin = 0;
  for (int f = 0; f < k; ++f) {
    const Eigen::Index size = n / k + (f < n % k ? 1 : 0);
    if (size < 2 || n - size < 2) {
      throw InvalidInput("cross_validate_lambda: fold " + std::to_string(f + 1) + " has " +
                         std::to_string(size) + " validation rows and " +
                         std::to_string(n - size) + " training rows (need >= 2 each)");
    }
    Fold fold;
    fold.validation = x.middleRows(begin, size);
    fold.train.resize(n - size, x.cols());
    fold.train << x.topRows(begin), x.bottomRows(n - begin - size);
    folds.push_back(std::move(fold));
    begin += size;
  }
  return folds;
}

double validation_loss(const Fold& fold, double lambda, const ScoreConfig& base) {
  ScoreConfig cfg = base;
  cfg.lambda = lambda;
  Matrix train = fold.train;
  Matrix validation = fold.validation;
  if (cfg.use_trim) {
    linalg::TrimResult trimmed = linalg::trim_transform(fold.train);
    validation = trimmed.transform.apply_to_rows(fold.validation);
    train = std::move(trimmed.x_tilde);
  }
  const SolveReport report = solve_adjusted(train, cfg);
  const Matrix& w = report.w_hat.weights();
  return (validation - validation * w).squaredNorm() / (2.0 * static_cast<double>(validation.rows()));
}

}  // namespace

CvResult cross_validate_lambda(const model::Dataset& data, const std::vector<double>& grid,
                               int folds, const ScoreConfig& cfg, int jobs) {
  cfg.validate();
  if (folds < 2) throw InvalidInput("cross_validate_lambda: need at least 2 folds");
  if (grid.empty()) throw InvalidInput("cross_validate_lambda: empty lambda grid");
  for (double l : grid) {
    if (!(l >= 0.0)) throw InvalidInput("cross_validate_lambda: grid values must be >= 0");
  }
  const std::vector<Fold> fold_data = make_folds(data.values(), folds);

  CvResult result;
  result.grid = grid;
  result.fold_losses.assign(grid.size(), std::vector<double>(folds, 0.0));

  const std::size_t tasks = grid.size() * static_cast<std::size_t>(folds);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks && !failed; t = next++) {
      const std::size_t g = t / folds;
      const std::size_t f = t % folds;
      try {
        result.fold_losses[g][f] = validation_loss(fold_data[f], grid[g], cfg);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(tasks));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Reduction in grid/fold order so the result is independent of scheduling.
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (double loss : result.fold_losses[g]) sum += loss;
    const double mean = sum / folds;
    result.mean_losses.push_back(mean);
    if (mean < best_loss || (mean == best_loss && grid[g] > result.best_lambda)) {
      best_loss = mean;
      result.best_lambda = grid[g];
    }
  }
  return result;
}

}  // namespace decs::score

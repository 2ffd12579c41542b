#include <spdlog/spdlog.h>

#include <filesystem>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/support.hpp"
#include "decs/error.hpp"
#include "decs/io.hpp"

namespace decs::cli {

int cmd_discover(const DiscoverOptions& opts) {
  const std::string text = io::read_text(opts.data);
  std::istringstream in(text);
  const model::Dataset data = io::parse_dataset_csv(in);
  if (data.cols() < 2) throw InvalidInput(opts.data.string() + ": need at least 2 columns");
  if (opts.cv && opts.lambda) throw InvalidInput("--cv and --lambda are exclusive");

  score::ScoreConfig cfg;
  cfg.use_trim = !opts.no_trim;
  if (opts.threshold) cfg.edge_threshold = *opts.threshold;
  const Matrix x_tilde = score::adjusted_data(data.values(), cfg.use_trim);
  std::filesystem::create_directories(opts.out);

  if (opts.cv) {
    const auto grid = score::default_lambda_grid(x_tilde);
    const auto cv = score::cross_validate_lambda(data, grid, opts.folds, cfg, opts.jobs);
    std::ostringstream csv;
    csv << "lambda,mean_loss";
    for (int f = 0; f < opts.folds; ++f) csv << ",fold_" << f + 1;
    csv << '\n';
    for (std::size_t g = 0; g < cv.grid.size(); ++g) {
      csv << io::format_double(cv.grid[g]) << ',' << io::format_double(cv.mean_losses[g]);
      for (double loss : cv.fold_losses[g]) csv << ',' << io::format_double(loss);
      csv << '\n';
    }
    io::write_text(opts.out / "cv.csv", csv.str());
    cfg.lambda = cv.best_lambda;
    spdlog::info("cross-validated lambda {}", cfg.lambda);
  } else {
    cfg.lambda = opts.lambda ? *opts.lambda : score::default_lambda(x_tilde);
  }

  const auto report = score::solve_adjusted(x_tilde, cfg);
  io::write_text(opts.out / "report.json", score::to_json(report, io::sha256_hex(text)) + "\n");
  io::write_edge_list(opts.out / "edges.tsv", report.w_hat, 0.0, data.names());
  spdlog::info("lambda {} edges {} converged {} ({:.2f} s)", report.lambda_used,
               report.w_hat.edge_count(), report.converged, report.wall_time.count());
  if (!report.converged) {
    spdlog::warn("augmented Lagrangian stopped at rho_max with h = {}",
                 report.trace.empty() ? 0.0 : report.trace.back().h_value);
    return kNotConverged;
  }
  return kOk;
}

}  // namespace decs::cli

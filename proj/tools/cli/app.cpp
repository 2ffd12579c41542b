#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>

#include "cli/commands.hpp"
#include "cli/support.hpp"
#include "decs/error.hpp"

namespace decs::cli {
namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("decs");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("DECS_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

}  // namespace

int run(int argc, char** argv) {
  if (!spdlog::get("decs")) setup_logging();

  CLI::App app{"Causal discovery under dense latent confounding"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a synthetic instance");
  simulate->add_option("--spec", sim.spec_file, "SEM spec JSON (defaults when omitted)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "Override the spec seed");
  simulate->add_option("--from-network", sim.network, "Edge-list TSV giving the true graph")
      ->check(CLI::ExistingFile);
  simulate->add_option("--remove-roots", sim.remove_roots,
                       "Root nodes to hide after sampling: 'all' or a comma list");
  simulate->add_flag("--reweight", sim.reweight, "Redraw network weights from the spec law");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  DiscoverOptions disc;
  auto* discover = app.add_subcommand("discover", "Estimate a DAG from data");
  discover->add_option("data", disc.data, "Data CSV")->required();
  discover->add_option("--out", disc.out, "Output directory")->required();
  auto* lambda = discover->add_option("--lambda", disc.lambda, "L1 penalty")->check(CLI::NonNegativeNumber);
  discover->add_flag("--cv", disc.cv, "Choose lambda by cross-validation")->excludes(lambda);
  discover->add_option("--folds", disc.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  discover->add_flag("--no-trim", disc.no_trim, "Solve on the unadjusted data");
  discover->add_option("--threshold", disc.threshold, "Edge threshold")->check(CLI::NonNegativeNumber);
  discover->add_option("--jobs", disc.jobs, "Worker threads")->check(CLI::PositiveNumber);

  EvaluateOptions eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score an estimate against a true graph");
  evaluate->add_option("estimate", eval.estimate, "edges.tsv or report.json")->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("truth", eval.truth, "True edge list")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--data", eval.data, "Data CSV supplying node names")->check(CLI::ExistingFile);
  evaluate->add_option("--dim", eval.dim, "Number of nodes")->check(CLI::PositiveNumber);
  evaluate->add_option("--threshold", eval.threshold, "Edge threshold")->check(CLI::NonNegativeNumber);
  evaluate->add_flag("--min-shd-threshold", eval.min_shd_threshold,
                     "Report at the threshold minimising SHD");
  evaluate->add_option("--out", eval.out, "Write metrics.json and curve.csv here");

  GridOptions grid;
  auto* grid_cmd = app.add_subcommand("grid", "Run an experiment grid");
  auto* grid_file = grid_cmd->add_option("grid", grid.grid_file, "Grid JSON")->check(CLI::ExistingFile);
  grid_cmd->add_option("--manifest", grid.manifest, "Rerun a previous manifest")
      ->check(CLI::ExistingFile)
      ->excludes(grid_file);
  grid_cmd->add_option("--out", grid.out, "Output directory")->required();
  grid_cmd->add_option("--jobs", grid.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ReproduceOptions repro;
  auto* reproduce = app.add_subcommand("reproduce", "Cross-environment reproducibility");
  reproduce->add_option("spec", repro.spec_file, "Environments JSON")->required()->check(CLI::ExistingFile);
  reproduce->add_option("--out", repro.out, "Output directory")->required();
  reproduce->add_option("--seed", repro.seed, "Override the base seed");
  reproduce->add_option("--jobs", repro.jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*discover) return cmd_discover(disc);
    if (*evaluate) return cmd_evaluate(eval);
    if (*grid_cmd) return cmd_grid(grid);
    if (*reproduce) return cmd_reproduce(repro);
  } catch (const UndefinedMetric& e) {
    spdlog::error("{}", e.what());
    return kUndefinedMetric;
  } catch (const score::SolverDiverged& e) {
    spdlog::error("solver diverged: {}", e.what());
    return kNotConverged;
  } catch (const InvalidInput& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const DegenerateInput& e) {
    spdlog::error("{}", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kFailure;
  }
  return kFailure;
}

}  // namespace decs::cli

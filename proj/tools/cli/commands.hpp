#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "decs/score.hpp"
#include "decs/simulate.hpp"

namespace decs::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kNotConverged = 3,
  kPartialFailure = 4,
  kUndefinedMetric = 5,
};

struct SimulateOptions {
  std::optional<std::filesystem::path> spec_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> network;  // --from-network
  std::optional<std::string> remove_roots;       // "all" or comma-separated ids/names
  bool reweight = false;                         // redraw network weights from the spec law
  std::filesystem::path out;
};

struct DiscoverOptions {
  std::filesystem::path data;
  std::filesystem::path out;
  std::optional<double> lambda;
  bool cv = false;
  int folds = 5;
  bool no_trim = false;
  std::optional<double> threshold;
  int jobs = 1;
};

struct EvaluateOptions {
  std::filesystem::path estimate;  // edges.tsv or report.json
  std::filesystem::path truth;
  std::optional<std::filesystem::path> data;  // column names for named edge lists
  std::optional<int> dim;
  double threshold = 0.3;
  bool min_shd_threshold = false;
  std::optional<std::filesystem::path> out;
};

struct GridOptions {
  std::optional<std::filesystem::path> grid_file;
  std::optional<std::filesystem::path> manifest;  // rerun from a previous manifest
  std::filesystem::path out;
  int jobs = 1;
};

struct ReproduceOptions {
  std::filesystem::path spec_file;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

int cmd_simulate(const SimulateOptions& opts);
int cmd_discover(const DiscoverOptions& opts);
int cmd_evaluate(const EvaluateOptions& opts);
int cmd_grid(const GridOptions& opts);
int cmd_reproduce(const ReproduceOptions& opts);

/// Parses argv, runs the selected command and maps exceptions to exit codes.
int run(int argc, char** argv);

}  // namespace decs::cli

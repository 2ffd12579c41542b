#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decs/io.hpp"
#include "decs/score.hpp"

namespace decs::cli {

using nlohmann::json;

std::string version();

/// Parses a JSON file; syntax errors become InvalidInput naming the file.
json read_json(const std::filesystem::path& path);

/// Solver block of grid and reproduce files. Every key is optional; "lambda"
/// may be a number or "auto" (plug-in default per dataset). Unknown keys are
/// rejected.
struct SolverSettings {
  score::ScoreConfig config;
  std::optional<double> lambda;  // unset: auto
};

SolverSettings solver_settings_from_json(const json& j);
json to_json(const SolverSettings& s);

/// Runs the configured solver on one dataset with the chosen lambda.
score::SolveReport solve_with(const model::Dataset& data, const SolverSettings& s, bool use_trim);

/// Calls task(i) for i in [0, count) on up to `jobs` threads. The first
/// exception thrown by a task is rethrown after all workers finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

/// Node names in order of first appearance across the edge lists, or empty
/// when every endpoint is a positive integer id.
std::vector<std::string> endpoint_names(const std::vector<const std::vector<io::RawEdge>*>& lists);

/// Derived 64-bit seed for work item `index` under `seed`.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace decs::cli

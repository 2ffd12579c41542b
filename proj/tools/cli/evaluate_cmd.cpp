#include <spdlog/spdlog.h>

#include <cmath>
#include <iostream>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/support.hpp"
#include "decs/error.hpp"
#include "decs/io.hpp"
#include "decs/metrics.hpp"

namespace decs::cli {
namespace {

std::vector<io::RawEdge> parse_edges_text(const std::string& text) {
  std::istringstream in(text);
  return io::parse_edge_list(in);
}

int inferred_dim(const std::vector<io::RawEdge>& edges, const std::vector<std::string>& names) {
  if (edges.empty()) return 0;
  return io::resolve_edges(edges, std::nullopt, names).dim();
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& opts) {
  const std::string est_text = io::read_text(opts.estimate);
  const auto truth_edges = io::read_edge_list(opts.truth);
  const bool is_report = opts.estimate.extension() == ".json";

  std::vector<std::string> names;
  std::optional<int> dim = opts.dim;
  if (opts.data) {
    const auto data = io::read_dataset_csv(*opts.data);
    names = data.names();
    if (!dim) dim = data.cols();
  }

  model::WeightedAdjacency w_hat;
  model::WeightedAdjacency ranking;  // weights swept for the AUC curve
  if (is_report) {
    const auto report = score::solve_report_from_json(est_text);
    if (dim && *dim != report.w_hat.dim()) {
      throw InvalidInput("report has dimension " + std::to_string(report.w_hat.dim()) +
                         ", expected " + std::to_string(*dim));
    }
    dim = report.w_hat.dim();
    w_hat = report.w_hat;
    ranking = model::WeightedAdjacency::with_zero_diagonal(report.w_raw);
    if (names.empty()) names = endpoint_names({&truth_edges});
  } else {
    const auto est_edges = parse_edges_text(est_text);
    if (names.empty()) names = endpoint_names({&truth_edges, &est_edges});
    if (!dim) {
      dim = names.empty() ? std::max(inferred_dim(truth_edges, {}), inferred_dim(est_edges, {}))
                          : static_cast<int>(names.size());
    }
    w_hat = io::resolve_edges(est_edges, dim, names);
    ranking = w_hat;
  }
  const auto truth = io::resolve_edges(truth_edges, dim, names);

  bool weighted = false;
  for (const auto& e : truth_edges) weighted = weighted || std::abs(e.weight) != 1.0;

  metrics::EvalResult result = opts.min_shd_threshold
                                   ? metrics::evaluate_at_min_shd(ranking, truth, weighted)
                                   : metrics::evaluate(w_hat, truth, opts.threshold, weighted);
  const auto sweep = metrics::auc_sweep(ranking, model::skeleton_of(truth));
  result.auc = sweep.auc;

  const std::string out = metrics::to_json(result, io::sha256_hex(est_text));
  if (opts.out) {
    std::filesystem::create_directories(*opts.out);
    io::write_text(*opts.out / "metrics.json", out + "\n");
    io::write_text(*opts.out / "curve.csv", metrics::curve_csv(sweep.curve));
  }
  std::cout << out << std::endl;
  spdlog::info("shd {} tpr {} fdr {} auc {}", result.shd, result.tpr, result.fdr, result.auc);
  return kOk;
}

}  // namespace decs::cli

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "decs/model.hpp"

namespace decs::metrics {

/// Size of the symmetric difference of the two edge sets.
int shd_skeleton(const model::Skeleton& est, const model::Skeleton& truth);

struct TprFdr {
  double tpr = 0.0;  // NaN when undefined (empty truth, nonempty estimate)
  double fdr = 0.0;
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;

  bool tpr_defined() const { return tpr == tpr; }
};

/// tpr = |est & truth| / |truth| (1 when both are empty), fdr = |est \ truth| /
/// |est| (0 for an empty estimate).
TprFdr tpr_fdr(const model::Skeleton& est, const model::Skeleton& truth);

struct CurvePoint {
  double threshold = 0.0;  // +inf for the empty estimate
  double fdr = 0.0;
  double tpr = 0.0;
};

struct AucResult {
  double auc = 0.0;
  std::vector<CurvePoint> curve;  // sorted by (fdr, tpr)
};

/// Area under TPR-versus-FDR as the edge threshold sweeps over every distinct
/// pair score max(|w_ij|, |w_ji|). A pair is included at threshold t when its
/// score is >= t and nonzero; t = +inf contributes the empty estimate (0, 0).
/// The curve is closed with (1, max tpr) and integrated by trapezoids. Throws
/// UndefinedMetric for an empty truth.
AucResult auc_sweep(const model::WeightedAdjacency& w_hat, const model::Skeleton& truth);

/// ||W_hat - W||_F^2 / p.
double l2_loss(const model::WeightedAdjacency& w_hat, const model::WeightedAdjacency& truth);

/// proportion[k-1] = #edges present in >= k skeletons / #edges in the union.
/// Throws UndefinedMetric when the union is empty.
std::vector<double> reproducibility_curve(const std::vector<model::Skeleton>& skeletons);

struct EvalResult {
  int shd = 0;
  double tpr = 0.0;
  double fdr = 0.0;
  double auc = 0.0;
  std::optional<double> l2_loss;
  double threshold_used = 0.0;
};

/// Metrics of the skeleton of w_hat at `threshold` (|w| > threshold), AUC
/// over the full sweep, and the l2 loss when a weighted truth is supplied.
EvalResult evaluate(const model::WeightedAdjacency& w_hat, const model::WeightedAdjacency& truth,
                    double threshold, bool weighted_truth = true);

/// Same as evaluate() but at the threshold (among 0 and the distinct pair
/// scores) minimising skeleton SHD; ties go to the larger threshold.
EvalResult evaluate_at_min_shd(const model::WeightedAdjacency& w_hat,
                               const model::WeightedAdjacency& truth, bool weighted_truth = true);

std::string to_json(const EvalResult& result, const std::string& source_hash = {});

/// threshold,fdr,tpr rows with a header line.
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace decs::metrics

#include "decs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "decs/error.hpp"
#include "decs/io.hpp"

namespace decs::metrics {
namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw InvalidInput(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
  }
}

struct PairScore {
  model::Skeleton::Pair pair;
  double score;
};

std::vector<PairScore> pair_scores(const model::WeightedAdjacency& w) {
  std::vector<PairScore> out;
  for (int i = 0; i < w.dim(); ++i) {
    for (int j = i + 1; j < w.dim(); ++j) {
      out.push_back({{i, j}, std::max(std::abs(w(i, j)), std::abs(w(j, i)))});
    }
  }
  return out;
}

}  // namespace

int shd_skeleton(const model::Skeleton& est, const model::Skeleton& truth) {
  require_same_dim(est.dim(), truth.dim(), "shd_skeleton");
  int diff = 0;
  for (const auto& e : est.edges()) diff += truth.edges().count(e) ? 0 : 1;
  for (const auto& e : truth.edges()) diff += est.edges().count(e) ? 0 : 1;
  return diff;
}

TprFdr tpr_fdr(const model::Skeleton& est, const model::Skeleton& truth) {
  require_same_dim(est.dim(), truth.dim(), "tpr_fdr");
  TprFdr r;
  for (const auto& e : est.edges()) {
    if (truth.edges().count(e)) {
      ++r.true_positives;
    } else {
      ++r.false_positives;
    }
  }
  r.false_negatives = static_cast<int>(truth.size()) - r.true_positives;
  if (truth.empty()) {
    r.tpr = est.empty() ? 1.0 : std::numeric_limits<double>::quiet_NaN();
  } else {
    r.tpr = static_cast<double>(r.true_positives) / static_cast<double>(truth.size());
  }
  r.fdr = est.empty() ? 0.0 : static_cast<double>(r.false_positives) / static_cast<double>(est.size());
  return r;
}

AucResult auc_sweep(const model::WeightedAdjacency& w_hat, const model::Skeleton& truth) {
  require_same_dim(w_hat.dim(), truth.dim(), "auc_sweep");
  if (truth.empty()) throw UndefinedMetric("auc_sweep: ground truth has no edges");

  std::vector<PairScore> scores = pair_scores(w_hat);
  std::sort(scores.begin(), scores.end(),
            [](const PairScore& a, const PairScore& b) { return a.score > b.score; });

  AucResult result;
  result.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  const double positives = static_cast<double>(truth.size());
  int tp = 0;
  int fp = 0;
  for (std::size_t k = 0; k < scores.size();) {
    const double t = scores[k].score;
    if (t <= 0.0) break;
    // Admit every pair tied at this score before emitting the point.
    for (; k < scores.size() && scores[k].score == t; ++k) {
      if (truth.edges().count(scores[k].pair)) {
        ++tp;
      } else {
        ++fp;
      }
    }
    result.curve.push_back({t, static_cast<double>(fp) / (tp + fp), tp / positives});
  }
  std::sort(result.curve.begin(), result.curve.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.fdr != b.fdr ? a.fdr < b.fdr : a.tpr < b.tpr;
  });

  double max_tpr = 0.0;
  for (const auto& pt : result.curve) max_tpr = std::max(max_tpr, pt.tpr);
  double area = 0.0;
  double prev_fdr = 0.0;
  double prev_tpr = 0.0;
  for (const auto& pt : result.curve) {
    area += (pt.fdr - prev_fdr) * 0.5 * (pt.tpr + prev_tpr);
    prev_fdr = pt.fdr;
    prev_tpr = pt.tpr;
  }
  area += (1.0 - prev_fdr) * 0.5 * (max_tpr + prev_tpr);
  result.auc = std::clamp(area, 0.0, 1.0);
  return result;
}

double l2_loss(const model::WeightedAdjacency& w_hat, const model::WeightedAdjacency& truth) {
  require_same_dim(w_hat.dim(), truth.dim(), "l2_loss");
  return (w_hat.weights() - truth.weights()).squaredNorm() / static_cast<double>(truth.dim());
}

std::vector<double> reproducibility_curve(const std::vector<model::Skeleton>& skeletons) {
  if (skeletons.size() < 2) throw InvalidInput("reproducibility_curve: need at least 2 skeletons");
  for (const auto& s : skeletons) require_same_dim(s.dim(), skeletons.front().dim(), "reproducibility_curve");

  std::map<model::Skeleton::Pair, int> counts;
  for (const auto& s : skeletons) {
    for (const auto& e : s.edges()) ++counts[e];
  }
  if (counts.empty()) throw UndefinedMetric("reproducibility_curve: every skeleton is empty");

  const std::size_t m = skeletons.size();
  std::vector<int> at_least(m + 1, 0);
  for (const auto& [pair, c] : counts) {
    for (int k = 1; k <= c; ++k) ++at_least[k];
  }
  std::vector<double> out;
  for (std::size_t k = 1; k <= m; ++k) {
    out.push_back(static_cast<double>(at_least[k]) / static_cast<double>(counts.size()));
  }
  return out;
}

EvalResult evaluate(const model::WeightedAdjacency& w_hat, const model::WeightedAdjacency& truth,
                    double threshold, bool weighted_truth) {
  require_same_dim(w_hat.dim(), truth.dim(), "evaluate");
  const model::Skeleton truth_skeleton = model::skeleton_of(truth, 0.0);
  const model::Skeleton est = model::skeleton_of(w_hat, threshold);
  EvalResult r;
  r.shd = shd_skeleton(est, truth_skeleton);
  const TprFdr rates = tpr_fdr(est, truth_skeleton);
  r.tpr = rates.tpr;
  r.fdr = rates.fdr;
  r.auc = auc_sweep(w_hat, truth_skeleton).auc;
  if (weighted_truth) r.l2_loss = l2_loss(w_hat, truth);
  r.threshold_used = threshold;
  return r;
}

EvalResult evaluate_at_min_shd(const model::WeightedAdjacency& w_hat,
                               const model::WeightedAdjacency& truth, bool weighted_truth) {
  require_same_dim(w_hat.dim(), truth.dim(), "evaluate_at_min_shd");
  const model::Skeleton truth_skeleton = model::skeleton_of(truth, 0.0);
  std::vector<double> candidates{0.0};
  for (const auto& ps : pair_scores(w_hat)) {
    if (ps.score > 0.0) candidates.push_back(ps.score);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  double best_threshold = 0.0;
  int best_shd = std::numeric_limits<int>::max();
  for (double t : candidates) {
    const int shd = shd_skeleton(model::skeleton_of(w_hat, t), truth_skeleton);
    if (shd <= best_shd) {
      best_shd = shd;
      best_threshold = t;
    }
  }
  return evaluate(w_hat, truth, best_threshold, weighted_truth);
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "threshold,fdr,tpr\n";
  for (const auto& pt : curve) {
    out << (std::isinf(pt.threshold) ? std::string("inf") : io::format_double(pt.threshold)) << ','
        << io::format_double(pt.fdr) << ',' << io::format_double(pt.tpr) << '\n';
  }
  return out.str();
}

}  // namespace decs::metrics

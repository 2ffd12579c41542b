#include "decs/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <unordered_set>

#include "decs/error.hpp"

namespace decs::model {

WeightedAdjacency::WeightedAdjacency(int dim) {
  if (dim < 1) throw InvalidInput("WeightedAdjacency: dimension must be positive");
  weights_ = Matrix::Zero(dim, dim);
}

WeightedAdjacency::WeightedAdjacency(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols() || weights_.rows() < 1) {
    throw InvalidInput("WeightedAdjacency: expected a non-empty square matrix, got " +
                       std::to_string(weights_.rows()) + "x" + std::to_string(weights_.cols()));
  }
  if (!weights_.allFinite()) {
    throw InvalidInput("WeightedAdjacency: non-finite weight");
  }
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    if (weights_(i, i) != 0.0) {
      throw InvalidInput("WeightedAdjacency: nonzero diagonal at node " + std::to_string(i + 1));
    }
  }
}

WeightedAdjacency WeightedAdjacency::with_zero_diagonal(Matrix weights) {
  if (weights.rows() == weights.cols()) weights.diagonal().setZero();
  return WeightedAdjacency(std::move(weights));
}

void WeightedAdjacency::set(NodeId from, NodeId to, double weight) {
  if (from == to && weight != 0.0) throw InvalidInput("WeightedAdjacency: self-loop");
  if (!std::isfinite(weight)) throw InvalidInput("WeightedAdjacency: non-finite weight");
  weights_(from, to) = weight;
}

int WeightedAdjacency::edge_count(double threshold) const {
  return static_cast<int>((weights_.array().abs() > threshold).count());
}

std::vector<Edge> edges_of(const WeightedAdjacency& w, double threshold) {
  std::vector<Edge> out;
  for (int i = 0; i < w.dim(); ++i) {
    for (int j = 0; j < w.dim(); ++j) {
      if (std::abs(w(i, j)) > threshold) out.push_back({i, j, w(i, j)});
    }
  }
  return out;
}

Dag::Dag(WeightedAdjacency adjacency) : adjacency_(std::move(adjacency)) {
  auto order = is_acyclic(adjacency_, 0.0);
  if (!order) throw InvalidInput("Dag: support contains a directed cycle");
  order_ = std::move(*order);
}

std::vector<NodeId> Dag::parents(NodeId node) const {
  std::vector<NodeId> out;
  for (int i = 0; i < dim(); ++i) {
    if (adjacency_(i, node) != 0.0) out.push_back(i);
  }
  return out;
}

int Dag::in_degree(NodeId node) const {
  return static_cast<int>((weights().col(node).array() != 0.0).count());
}

void Skeleton::add(NodeId a, NodeId b) {
  if (a == b) throw InvalidInput("Skeleton: self-pair {" + std::to_string(a + 1) + "}");
  if (a < 0 || b < 0 || a >= dim_ || b >= dim_) {
    throw InvalidInput("Skeleton: node id out of range");
  }
  edges_.emplace(std::min(a, b), std::max(a, b));
}

bool Skeleton::contains(NodeId a, NodeId b) const {
  return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

Dataset::Dataset(Matrix values, std::vector<std::string> names)
    : values_(std::move(values)), names_(std::move(names)) {
  if (!values_.allFinite()) throw InvalidInput("Dataset: non-finite value");
  if (!names_.empty()) {
    if (static_cast<Eigen::Index>(names_.size()) != values_.cols()) {
      throw InvalidInput("Dataset: " + std::to_string(names_.size()) + " names for " +
                         std::to_string(values_.cols()) + " columns");
    }
    std::unordered_set<std::string> seen;
    for (const auto& n : names_) {
      if (!seen.insert(n).second) throw InvalidInput("Dataset: duplicate column name '" + n + "'");
    }
  }
}

std::optional<std::vector<NodeId>> is_acyclic(const WeightedAdjacency& w,
                                              double support_threshold) {
  const int p = w.dim();
  const auto& m = w.weights();
  std::vector<int> indegree(p, 0);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (std::abs(m(i, j)) > support_threshold) ++indegree[j];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int j = 0; j < p; ++j) {
    if (indegree[j] == 0) ready.push(j);
  }
  std::vector<NodeId> order;
  order.reserve(p);
  while (!ready.empty()) {
    const int i = ready.top();
    ready.pop();
    order.push_back(i);
    for (int j = 0; j < p; ++j) {
      if (std::abs(m(i, j)) > support_threshold && --indegree[j] == 0) ready.push(j);
    }
  }
  if (static_cast<int>(order.size()) != p) return std::nullopt;
  return order;
}

std::optional<std::vector<NodeId>> find_cycle(const WeightedAdjacency& w,
                                              double support_threshold) {
  const int p = w.dim();
  const auto& m = w.weights();
  enum class Mark { kNew, kActive, kDone };
  std::vector<Mark> mark(p, Mark::kNew);
  std::vector<int> parent(p, -1);

  // Iterative DFS; each frame is (node, next child to inspect).
  for (int root = 0; root < p; ++root) {
    if (mark[root] != Mark::kNew) continue;
    std::vector<std::pair<int, int>> stack{{root, 0}};
    mark[root] = Mark::kActive;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next == p) {
        mark[node] = Mark::kDone;
        stack.pop_back();
        continue;
      }
      const int child = next++;
      if (std::abs(m(node, child)) <= support_threshold) continue;
      if (mark[child] == Mark::kActive) {
        std::vector<NodeId> cycle{child};
        for (int v = node; v != child; v = parent[v]) cycle.push_back(v);
        std::reverse(cycle.begin() + 1, cycle.end());
        return cycle;
      }
      if (mark[child] == Mark::kNew) {
        mark[child] = Mark::kActive;
        parent[child] = node;
        stack.emplace_back(child, 0);
      }
    }
  }
  return std::nullopt;
}

Skeleton skeleton_of(const WeightedAdjacency& w, double threshold) {
  Skeleton s(w.dim());
  for (int i = 0; i < w.dim(); ++i) {
    for (int j = i + 1; j < w.dim(); ++j) {
      if (std::abs(w(i, j)) > threshold || std::abs(w(j, i)) > threshold) s.add(i, j);
    }
  }
  return s;
}

}  // namespace decs::model

#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "decs/linalg.hpp"

namespace decs::model {

/// Node index, 0-based in memory. Files use 1-based ids.
using NodeId = int;

/// p x p matrix of edge weights. weights(i, j) != 0 means an edge i -> j, i.e.
/// X_i is a parent of X_j and the data model reads X = X W + H B^T + E.
class WeightedAdjacency {
 public:
  WeightedAdjacency() = default;
  explicit WeightedAdjacency(int dim);
  /// Validates squareness, finiteness and a zero diagonal.
  explicit WeightedAdjacency(Matrix weights);

  /// Copies `weights` with the diagonal forced to zero.
  static WeightedAdjacency with_zero_diagonal(Matrix weights);

  int dim() const { return static_cast<int>(weights_.rows()); }
  const Matrix& weights() const { return weights_; }
  double operator()(NodeId from, NodeId to) const { return weights_(from, to); }

  void set(NodeId from, NodeId to, double weight);

  /// Number of entries with |w| > threshold.
  int edge_count(double threshold = 0.0) const;

 private:
  Matrix weights_;
};

struct Edge {
  NodeId from;
  NodeId to;
  double weight;
};

std::vector<Edge> edges_of(const WeightedAdjacency& w, double threshold = 0.0);

/// Weighted DAG together with one topological order of its support.
class Dag {
 public:
  Dag() = default;
  /// Throws InvalidInput if the support of `adjacency` has a cycle.
  explicit Dag(WeightedAdjacency adjacency);

  int dim() const { return adjacency_.dim(); }
  const WeightedAdjacency& adjacency() const { return adjacency_; }
  const Matrix& weights() const { return adjacency_.weights(); }
  const std::vector<NodeId>& order() const { return order_; }

  std::vector<NodeId> parents(NodeId node) const;
  int in_degree(NodeId node) const;

 private:
  WeightedAdjacency adjacency_;
  std::vector<NodeId> order_;
};

/// Undirected edge set with pairs stored as (min, max).
class Skeleton {
 public:
  using Pair = std::pair<NodeId, NodeId>;

  Skeleton() = default;
  explicit Skeleton(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::set<Pair>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }

  /// Adds {a, b}; throws InvalidInput for self-pairs or out-of-range ids.
  void add(NodeId a, NodeId b);
  bool contains(NodeId a, NodeId b) const;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;

 private:
  int dim_ = 0;
  std::set<Pair> edges_;
};

/// n x p observations with optional unique column names.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Matrix values, std::vector<std::string> names = {});

  int rows() const { return static_cast<int>(values_.rows()); }
  int cols() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& names() const { return names_; }
  bool has_names() const { return !names_.empty(); }

 private:
  Matrix values_;
  std::vector<std::string> names_;
};

/// Topological order of the graph with edges {|w_ij| > support_threshold}, or
/// nullopt when that graph has a directed cycle. Kahn's algorithm, ties broken
/// by smallest index.
std::optional<std::vector<NodeId>> is_acyclic(const WeightedAdjacency& w,
                                              double support_threshold = 0.0);

/// One directed cycle of the thresholded support as a node sequence
/// (v0 -> v1 -> ... -> v0), or nullopt if acyclic.
std::optional<std::vector<NodeId>> find_cycle(const WeightedAdjacency& w,
                                              double support_threshold = 0.0);

/// {i, j} is present iff |w_ij| > threshold or |w_ji| > threshold.
Skeleton skeleton_of(const WeightedAdjacency& w, double threshold = 0.0);

}  // namespace decs::model

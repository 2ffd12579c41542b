#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "decs/linalg.hpp"
#include "decs/model.hpp"
#include "decs/rng.hpp"

namespace decs::simulate {

enum class NoiseFamily { kGaussian, kExponential, kGumbel };

std::string_view to_string(NoiseFamily family);
/// Accepts "gaussian", "exponential", "gumbel"; throws InvalidInput otherwise.
NoiseFamily noise_family_from_string(std::string_view name);

/// Erdos-Renyi DAG with `expected_edges` edges on average.
struct ErGraph {
  double expected_edges = 20.0;
};

/// Preferential-attachment DAG, `attachment` edges per added node.
struct SfGraph {
  int attachment = 1;
};

using GraphModel = std::variant<ErGraph, SfGraph>;

/// Dense loading matrix with i.i.d. N(0, scale^2) entries.
struct DenseGaussianB {
  double scale = 1.0;
};

/// Sparse loading matrix with `edge_count` nonzeros spread over the q columns,
/// weights drawn with the same law as W.
struct SparseDagB {
  int edge_count = 20;
};

using BModel = std::variant<DenseGaussianB, SparseDagB>;

/// Full generative description of a confounded linear SEM
/// X = X W + H B^T + E. Defaults are the standard desk-scale design.
struct SemSpec {
  int p = 20;
  int q = 10;
  int n = 100;
  GraphModel graph = ErGraph{20.0};
  double weight_lo = 0.5;
  double weight_hi = 2.0;
  BModel b_model = DenseGaussianB{1.0};
  NoiseFamily noise = NoiseFamily::kGaussian;
  double sigma = 0.2;
  std::uint64_t seed = 0;

  /// Throws InvalidInput naming the offending field.
  void validate() const;
};

struct GeneratedInstance {
  model::Dag truth;
  Matrix b;             // p x q
  model::Dataset data;  // n x p
  Matrix latent;        // n x q realised confounders, including any environment scale
  Matrix noise;         // n x p realised E
  double latent_scale = 1.0;
};

/// Random topological order, then every order-respecting pair becomes an edge
/// independently with probability 2e / (p^2 - p) clamped to [0, 1]. Edges
/// carry unit weight. Throws InvalidInput for p < 2 or e < 0.
model::Dag gen_er_dag(int p, double expected_edges, Rng& rng);

/// Edge probability used by gen_er_dag.
double er_edge_probability(int p, double expected_edges);

/// Nodes are added in index order; each attaches min(m, #existing) edges to
/// distinct existing nodes chosen with probability proportional to degree + 1.
/// Edges point old -> new. Unit weights.
model::Dag gen_sf_dag(int p, int attachment, Rng& rng);

/// Replaces every edge weight by sign * Uniform[lo, hi] with a fair-coin sign.
model::WeightedAdjacency assign_weights(const model::Dag& dag, double lo, double hi, Rng& rng);

/// Zero-mean, unit-variance draw from the family: Exponential(1) and
/// Gumbel(0, 1) are centred by their means (1 and Euler-Mascheroni) and divided
/// by their standard deviations (1 and pi / sqrt(6)).
double standardized_draw(NoiseFamily family, Rng& rng);
Matrix standardized_noise(NoiseFamily family, int rows, int cols, Rng& rng);

/// Graph and weights for a spec, drawn from the spec's seed.
model::Dag draw_weighted_dag(const SemSpec& spec);

/// Confounder loading B (p x q) for a spec, drawn from the spec's seed.
Matrix draw_loading(const SemSpec& spec);

/// Forward substitution in topological order: X_j = sum_i w_ij X_i + exo_j.
Matrix propagate(const model::Dag& truth, const Matrix& exogenous);

/// Samples data for a fixed graph and loading. `latent_scale` multiplies the
/// unit-scale confounder draws. Streams for H and E are split from `rng`.
GeneratedInstance sample_on(const model::Dag& truth, const Matrix& b, NoiseFamily noise,
                            double sigma, int n, double latent_scale, Rng& rng);

/// Draws graph, weights, B, H and E from the spec's seed. Bit-reproducible.
GeneratedInstance sample_sem(const SemSpec& spec);

/// Population bias C = Cov(X)^{-1} Cov(X, H) B^T with zero diagonal, where
/// Cov(X) = (I - W)^{-T} (B B^T + sigma_e^2 I) (I - W)^{-1} and
/// Cov(X, H) = (I - W)^{-T} B. Throws SingularCovariance when Cov(X) is
/// singular and InvalidInput when the support of W is cyclic.
model::WeightedAdjacency confounding_bias(const Matrix& w, const Matrix& b, double sigma_e);

/// Population covariance used by confounding_bias.
Matrix population_covariance(const Matrix& w, const Matrix& b, double sigma_e);

struct Environments {
  std::vector<GeneratedInstance> instances;
  std::vector<double> latent_scales;
};

/// m datasets sharing W and B (drawn from base.seed); each environment draws a
/// latent scale uniformly from [sigma_lo, sigma_hi] and fresh H and E.
Environments gen_environments(const SemSpec& base, int count, double sigma_lo, double sigma_hi,
                              Rng& rng);

struct RootRemoval {
  model::Dag truth;
  model::Dataset data;
  std::vector<model::NodeId> kept;  // new index -> original index
};

/// Deletes the listed in-degree-0 nodes from the graph and their columns from
/// the data. Throws InvalidInput naming the first listed node that is not a
/// root.
RootRemoval remove_roots(const model::Dag& truth, const model::Dataset& data,
                         const std::vector<model::NodeId>& roots);

// spec.json (de)serialisation. Missing fields take SemSpec defaults; invalid
// fields throw InvalidInput with the field name.
std::string to_json(const SemSpec& spec);
SemSpec sem_spec_from_json(std::string_view text);

/// Hex SHA-256 of the canonical JSON form.
std::string spec_hash(const SemSpec& spec);

/// Writes data.csv, truth.tsv, b.csv and spec.json into `dir` (created if
/// missing).
void write_instance(const std::filesystem::path& dir, const GeneratedInstance& instance,
                    const SemSpec& spec);

}  // namespace decs::simulate

#include "decs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "decs/error.hpp"

namespace decs::simulate {
namespace {

// Stream ids split from the spec seed.
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kLoadingStream = 3;
constexpr std::uint64_t kLatentStream = 4;
constexpr std::uint64_t kNoiseStream = 5;
constexpr std::uint64_t kSampleStream = 6;

const double kGumbelStd = std::numbers::pi / std::sqrt(6.0);

}  // namespace

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return "gaussian";
    case NoiseFamily::kExponential:
      return "exponential";
    case NoiseFamily::kGumbel:
      return "gumbel";
  }
  return "unknown";
}

NoiseFamily noise_family_from_string(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "exponential") return NoiseFamily::kExponential;
  if (name == "gumbel") return NoiseFamily::kGumbel;
  throw InvalidInput("unknown noise family '" + std::string(name) +
                     "' (expected gaussian, exponential or gumbel)");
}

void SemSpec::validate() const {
  if (p < 1) throw InvalidInput("spec field 'p': must be >= 1");
  if (q < 0) throw InvalidInput("spec field 'q': must be >= 0");
  if (n < 1) throw InvalidInput("spec field 'n': must be >= 1");
  if (!(weight_lo > 0.0) || !(weight_hi >= weight_lo) || !std::isfinite(weight_hi)) {
    throw InvalidInput("spec field 'weight_range': need 0 < lo <= hi");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidInput("spec field 'sigma': must be > 0");
  if (const auto* er = std::get_if<ErGraph>(&graph)) {
    if (p < 2) throw InvalidInput("spec field 'p': ER graphs need p >= 2");
    if (!(er->expected_edges >= 0.0)) {
      throw InvalidInput("spec field 'graph.expected_edges': must be >= 0");
    }
  } else if (std::get<SfGraph>(graph).attachment < 1) {
    throw InvalidInput("spec field 'graph.attachment': must be >= 1");
  }
  if (const auto* dense = std::get_if<DenseGaussianB>(&b_model)) {
    if (!(dense->scale >= 0.0)) throw InvalidInput("spec field 'b_model.scale': must be >= 0");
  } else if (std::get<SparseDagB>(b_model).edge_count < 0) {
    throw InvalidInput("spec field 'b_model.edge_count': must be >= 0");
  }
}

double er_edge_probability(int p, double expected_edges) {
  const double denom = static_cast<double>(p) * p - p;
  return std::clamp(2.0 * expected_edges / denom, 0.0, 1.0);
}

model::Dag gen_er_dag(int p, double expected_edges, Rng& rng) {
  if (p < 2) throw InvalidInput("gen_er_dag: p must be >= 2");
  if (!(expected_edges >= 0.0)) throw InvalidInput("gen_er_dag: expected edges must be >= 0");
  const double prob = er_edge_probability(p, expected_edges);
  const std::vector<int> order = rng.permutation(p);
  model::WeightedAdjacency w(p);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (rng.bernoulli(prob)) w.set(order[a], order[b], 1.0);
    }
  }
  return model::Dag(std::move(w));
}

model::Dag gen_sf_dag(int p, int attachment, Rng& rng) {
  if (p < 1) throw InvalidInput("gen_sf_dag: p must be >= 1");
  if (attachment < 1) throw InvalidInput("gen_sf_dag: attachment must be >= 1");
  model::WeightedAdjacency w(p);
  std::vector<double> degree(p, 0.0);
  for (int node = 1; node < p; ++node) {
    const int picks = std::min(attachment, node);
    std::vector<int> chosen;
    while (static_cast<int>(chosen.size()) < picks) {
      double total = 0.0;
      for (int i = 0; i < node; ++i) total += degree[i] + 1.0;
      double target = rng.uniform() * total;
      int pick = node - 1;
      for (int i = 0; i < node; ++i) {
        target -= degree[i] + 1.0;
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
      if (std::find(chosen.begin(), chosen.end(), pick) == chosen.end()) chosen.push_back(pick);
    }
    for (int parent : chosen) {
      w.set(parent, node, 1.0);
      degree[parent] += 1.0;
      degree[node] += 1.0;
    }
  }
  return model::Dag(std::move(w));
}

model::WeightedAdjacency assign_weights(const model::Dag& dag, double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(hi >= lo)) throw InvalidInput("assign_weights: need 0 < lo <= hi");
  model::WeightedAdjacency out(dag.dim());
  for (const auto& e : model::edges_of(dag.adjacency())) {
    const double magnitude = rng.uniform(lo, hi);
    out.set(e.from, e.to, rng.sign() * magnitude);
  }
  return out;
}

double standardized_draw(NoiseFamily family, Rng& rng) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return rng.normal();
    case NoiseFamily::kExponential:
      return rng.exponential() - 1.0;
    case NoiseFamily::kGumbel:
      return (rng.gumbel() - std::numbers::egamma) / kGumbelStd;
  }
  return 0.0;
}

Matrix standardized_noise(NoiseFamily family, int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  // Row-major fill so a prefix of rows does not depend on the column count.
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = standardized_draw(family, rng);
  }
  return m;
}

model::Dag draw_weighted_dag(const SemSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);
  Rng graph_rng = root.split(kGraphStream);
  Rng weight_rng = root.split(kWeightStream);
  const model::Dag skeleton = std::visit(
      [&](const auto& g) -> model::Dag {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ErGraph>) {
          return gen_er_dag(spec.p, g.expected_edges, graph_rng);
        } else {
          return gen_sf_dag(spec.p, g.attachment, graph_rng);
        }
      },
      spec.graph);
  return model::Dag(assign_weights(skeleton, spec.weight_lo, spec.weight_hi, weight_rng));
}

Matrix draw_loading(const SemSpec& spec) {
  spec.validate();
  Rng rng = Rng(spec.seed).split(kLoadingStream);
  Matrix b = Matrix::Zero(spec.p, spec.q);
  if (spec.q == 0) return b;
  if (const auto* dense = std::get_if<DenseGaussianB>(&spec.b_model)) {
    for (int i = 0; i < spec.p; ++i) {
      for (int k = 0; k < spec.q; ++k) b(i, k) = dense->scale * rng.normal();
    }
    return b;
  }
  // Sparse: edge_count nonzeros spread as evenly as possible over columns,
  // each column supported on distinct random rows.
  const int total = std::get<SparseDagB>(spec.b_model).edge_count;
  for (int k = 0; k < spec.q; ++k) {
    const int in_column = std::min(spec.p, total / spec.q + (k < total % spec.q ? 1 : 0));
    const std::vector<int> rows = rng.permutation(spec.p);
    for (int r = 0; r < in_column; ++r) {
      b(rows[r], k) = rng.sign() * rng.uniform(spec.weight_lo, spec.weight_hi);
    }
  }
  return b;
}

Matrix propagate(const model::Dag& truth, const Matrix& exogenous) {
  if (exogenous.cols() != truth.dim()) throw InvalidInput("propagate: column count mismatch");
  Matrix x = exogenous;
  const Matrix& w = truth.weights();
  for (model::NodeId j : truth.order()) {
    for (model::NodeId i : truth.parents(j)) x.col(j) += w(i, j) * x.col(i);
  }
  return x;
}

GeneratedInstance sample_on(const model::Dag& truth, const Matrix& b, NoiseFamily noise,
                            double sigma, int n, double latent_scale, Rng& rng) {
  const int p = truth.dim();
  if (b.rows() != p) throw InvalidInput("sample: loading matrix must have p rows");
  if (n < 1) throw InvalidInput("sample: n must be >= 1");
  const int q = static_cast<int>(b.cols());

  Rng latent_rng = rng.split(kLatentStream);
  Rng noise_rng = rng.split(kNoiseStream);

  GeneratedInstance out;
  out.latent_scale = latent_scale;
  out.latent = latent_scale * standardized_noise(noise, n, q, latent_rng);
  out.noise = sigma * standardized_noise(noise, n, p, noise_rng);
  Matrix exogenous = out.noise;
  if (q > 0) exogenous.noalias() += out.latent * b.transpose();
  out.data = model::Dataset(propagate(truth, exogenous));
  out.truth = truth;
  out.b = b;
  return out;
}

GeneratedInstance sample_sem(const SemSpec& spec) {
  spec.validate();
  const model::Dag truth = draw_weighted_dag(spec);
  const Matrix b = draw_loading(spec);
  Rng rng = Rng(spec.seed).split(kSampleStream);
  return sample_on(truth, b, spec.noise, spec.sigma, spec.n, 1.0, rng);
}

Matrix population_covariance(const Matrix& w, const Matrix& b, double sigma_e) {
  const Eigen::Index p = w.rows();
  if (w.cols() != p || b.rows() != p) throw InvalidInput("population_covariance: shape mismatch");
  if (!model::is_acyclic(model::WeightedAdjacency::with_zero_diagonal(w))) {
    throw InvalidInput("population_covariance: W is not acyclic");
  }
  const Matrix m_inv = (Matrix::Identity(p, p) - w).partialPivLu().inverse();
  Matrix inner = sigma_e * sigma_e * Matrix::Identity(p, p);
  if (b.cols() > 0) inner.noalias() += b * b.transpose();
  return m_inv.transpose() * inner * m_inv;
}

model::WeightedAdjacency confounding_bias(const Matrix& w, const Matrix& b, double sigma_e) {
  const Eigen::Index p = w.rows();
  const Matrix cov = population_covariance(w, b, sigma_e);
  Eigen::FullPivLU<Matrix> lu(cov);
  if (!lu.isInvertible()) {
    throw SingularCovariance("confounding_bias: Cov(X) is singular (rank " +
                             std::to_string(lu.rank()) + " of " + std::to_string(p) + ")");
  }
  if (b.cols() == 0 || b.isZero(0.0)) return model::WeightedAdjacency(static_cast<int>(p));

  const Matrix m_inv = (Matrix::Identity(p, p) - w).partialPivLu().inverse();
  const Matrix cov_xh = m_inv.transpose() * b;
  Matrix c = lu.solve(cov_xh) * b.transpose();
  c.diagonal().setZero();
  return model::WeightedAdjacency(std::move(c));
}

Environments gen_environments(const SemSpec& base, int count, double sigma_lo, double sigma_hi,
                              Rng& rng) {
  if (count < 2) throw InvalidInput("gen_environments: need at least 2 environments");
  if (!(sigma_lo > 0.0) || !(sigma_hi >= sigma_lo)) {
    throw InvalidInput("gen_environments: need 0 < sigma_lo <= sigma_hi");
  }
  base.validate();
  const model::Dag truth = draw_weighted_dag(base);
  const Matrix b = draw_loading(base);

  Environments out;
  for (int k = 0; k < count; ++k) {
    Rng env_rng = rng.split(static_cast<std::uint64_t>(k));
    const double scale = env_rng.uniform(sigma_lo, sigma_hi);
    out.latent_scales.push_back(scale);
    out.instances.push_back(sample_on(truth, b, base.noise, base.sigma, base.n, scale, env_rng));
  }
  return out;
}

RootRemoval remove_roots(const model::Dag& truth, const model::Dataset& data,
                         const std::vector<model::NodeId>& roots) {
  const int p = truth.dim();
  if (data.cols() != p) throw InvalidInput("remove_roots: data has the wrong number of columns");
  std::vector<bool> drop(p, false);
  for (model::NodeId r : roots) {
    if (r < 0 || r >= p) {
      throw InvalidInput("remove_roots: node " + std::to_string(r + 1) + " is out of range");
    }
    if (truth.in_degree(r) != 0) {
      throw InvalidInput("remove_roots: node " + std::to_string(r + 1) + " is not a root");
    }
    drop[r] = true;
  }

  RootRemoval out;
  for (int i = 0; i < p; ++i) {
    if (!drop[i]) out.kept.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(out.kept.size());
  if (k == 0) throw InvalidInput("remove_roots: every node would be removed");
  Matrix w(k, k);
  Matrix values(data.rows(), k);
  std::vector<std::string> names;
  for (Eigen::Index a = 0; a < k; ++a) {
    values.col(a) = data.values().col(out.kept[a]);
    if (data.has_names()) names.push_back(data.names()[out.kept[a]]);
    for (Eigen::Index c = 0; c < k; ++c) w(a, c) = truth.weights()(out.kept[a], out.kept[c]);
  }
  out.truth = model::Dag(model::WeightedAdjacency(std::move(w)));
  out.data = model::Dataset(std::move(values), std::move(names));
  return out;
}

}  // namespace decs::simulate

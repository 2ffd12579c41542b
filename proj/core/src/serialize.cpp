// JSON forms of the library's persisted records.

#include <openssl/evp.h>

#include <cmath>
#include <filesystem>
#include <nlohmann/json.hpp>

#include "decs/error.hpp"
#include "decs/io.hpp"
#include "decs/metrics.hpp"
#include "decs/score.hpp"
#include "decs/simulate.hpp"

namespace decs {
namespace {

using nlohmann::json;

}  // namespace

std::string io::sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

// Reads an optional field, reporting type errors by field name.
template <typename T>
void read_field(const json& j, const char* key, T& out, const std::string& prefix = {}) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput("spec field '" + prefix + key + "': wrong type");
  }
}

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw InvalidInput("matrix JSON: data length does not match rows * cols");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[i * cols + c].get<double>();
  }
  return m;
}

}  // namespace

namespace simulate {

std::string to_json(const SemSpec& spec) {
  json j;
  j["p"] = spec.p;
  j["q"] = spec.q;
  j["n"] = spec.n;
  if (const auto* er = std::get_if<ErGraph>(&spec.graph)) {
    j["graph"] = {{"model", "er"}, {"expected_edges", er->expected_edges}};
  } else {
    j["graph"] = {{"model", "sf"}, {"attachment", std::get<SfGraph>(spec.graph).attachment}};
  }
  j["weight_range"] = {spec.weight_lo, spec.weight_hi};
  if (const auto* dense = std::get_if<DenseGaussianB>(&spec.b_model)) {
    j["b_model"] = {{"kind", "dense_gaussian"}, {"scale", dense->scale}};
  } else {
    j["b_model"] = {{"kind", "sparse_dag"}, {"edge_count", std::get<SparseDagB>(spec.b_model).edge_count}};
  }
  j["noise"] = std::string(to_string(spec.noise));
  j["sigma"] = spec.sigma;
  j["seed"] = spec.seed;
  return j.dump(2);
}

SemSpec sem_spec_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("spec: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("spec: top level must be an object");

  SemSpec spec;
  read_field(j, "p", spec.p);
  read_field(j, "q", spec.q);
  read_field(j, "n", spec.n);
  read_field(j, "sigma", spec.sigma);
  read_field(j, "seed", spec.seed);

  // Default design ties the expected edge count to p.
  spec.graph = ErGraph{static_cast<double>(spec.p)};
  if (j.contains("graph")) {
    const json& g = j["graph"];
    if (!g.is_object()) throw InvalidInput("spec field 'graph': must be an object");
    std::string model = "er";
    read_field(g, "model", model, "graph.");
    if (model == "er") {
      ErGraph er{static_cast<double>(spec.p)};
      read_field(g, "expected_edges", er.expected_edges, "graph.");
      spec.graph = er;
    } else if (model == "sf") {
      SfGraph sf;
      read_field(g, "attachment", sf.attachment, "graph.");
      spec.graph = sf;
    } else {
      throw InvalidInput("spec field 'graph.model': expected 'er' or 'sf', got '" + model + "'");
    }
  }
  if (j.contains("weight_range")) {
    const json& r = j["weight_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw InvalidInput("spec field 'weight_range': expected [lo, hi]");
    }
    spec.weight_lo = r[0].get<double>();
    spec.weight_hi = r[1].get<double>();
  }
  if (j.contains("b_model")) {
    const json& b = j["b_model"];
    if (!b.is_object()) throw InvalidInput("spec field 'b_model': must be an object");
    std::string kind = "dense_gaussian";
    read_field(b, "kind", kind, "b_model.");
    if (kind == "dense_gaussian") {
      DenseGaussianB dense;
      read_field(b, "scale", dense.scale, "b_model.");
      spec.b_model = dense;
    } else if (kind == "sparse_dag") {
      SparseDagB sparse;
      read_field(b, "edge_count", sparse.edge_count, "b_model.");
      spec.b_model = sparse;
    } else {
      throw InvalidInput("spec field 'b_model.kind': expected 'dense_gaussian' or 'sparse_dag'");
    }
  }
  if (j.contains("noise")) {
    std::string noise;
    read_field(j, "noise", noise);
    try {
      spec.noise = noise_family_from_string(noise);
    } catch (const InvalidInput& e) {
      throw InvalidInput(std::string("spec field 'noise': ") + e.what());
    }
  }
  spec.validate();
  return spec;
}

std::string spec_hash(const SemSpec& spec) { return io::sha256_hex(to_json(spec)); }

void write_instance(const std::filesystem::path& dir, const GeneratedInstance& instance,
                    const SemSpec& spec) {
  std::filesystem::create_directories(dir);
  io::write_dataset_csv(dir / "data.csv", instance.data);
  io::write_edge_list(dir / "truth.tsv", instance.truth.adjacency(), 0.0, instance.data.names());
  io::write_matrix_csv(dir / "b.csv", instance.b);
  json j = json::parse(to_json(spec));
  j["spec_hash"] = spec_hash(spec);
  j["rng"] = std::string(Rng::kAlgorithm);
  io::write_text(dir / "spec.json", j.dump(2) + "\n");
}

}  // namespace simulate

namespace score {

std::string to_json(const SolveReport& report, const std::string& data_hash) {
  json trace = json::array();
  for (const auto& t : report.trace) {
    trace.push_back({{"outer_iter", t.outer_iter},
                     {"score", t.score},
                     {"h_value", t.h_value},
                     {"rho", t.rho},
                     {"alpha", t.alpha}});
  }
  json j;
  j["w_hat"] = matrix_json(report.w_hat.weights());
  j["w_raw"] = matrix_json(report.w_raw);
  j["lambda_used"] = report.lambda_used;
  j["converged"] = report.converged;
  j["repaired_edges"] = report.repaired_edges;
  j["wall_time_s"] = report.wall_time.count();
  j["trace"] = std::move(trace);
  if (!data_hash.empty()) j["data_hash"] = data_hash;
  return j.dump(2);
}

SolveReport solve_report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SolveReport r;
    r.w_hat = model::WeightedAdjacency(matrix_from_json(j.at("w_hat")));
    r.w_raw = j.contains("w_raw") ? matrix_from_json(j.at("w_raw")) : r.w_hat.weights();
    r.lambda_used = j.at("lambda_used").get<double>();
    r.converged = j.at("converged").get<bool>();
    r.repaired_edges = j.value("repaired_edges", 0);
    r.wall_time = std::chrono::duration<double>(j.value("wall_time_s", 0.0));
    for (const auto& t : j.at("trace")) {
      r.trace.push_back({t.at("outer_iter").get<int>(), t.at("score").get<double>(),
                         t.at("h_value").get<double>(), t.at("rho").get<double>(),
                         t.at("alpha").get<double>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("report JSON: ") + e.what());
  }
}

}  // namespace score

namespace metrics {

std::string to_json(const EvalResult& r, const std::string& source_hash) {
  json j;
  j["shd"] = r.shd;
  j["tpr"] = std::isnan(r.tpr) ? json(nullptr) : json(r.tpr);
  j["fdr"] = r.fdr;
  j["auc"] = r.auc;
  j["l2_loss"] = r.l2_loss ? json(*r.l2_loss) : json(nullptr);
  j["threshold_used"] = r.threshold_used;
  if (!source_hash.empty()) j["source_hash"] = source_hash;
  return j.dump(2);
}

}  // namespace metrics

}  // namespace decs

#include <spdlog/spdlog.h>

#include <sstream>

#include "cli/commands.hpp"
#include "cli/support.hpp"
#include "decs/error.hpp"
#include "decs/io.hpp"

namespace decs::cli {
namespace {

// Same stream ids as the spec-driven generator.
constexpr std::uint64_t kWeightStream = 2;
constexpr std::uint64_t kSampleStream = 6;

std::vector<model::NodeId> parse_roots(const std::string& list, const model::Dag& truth,
                                       const std::vector<std::string>& names) {
  std::vector<model::NodeId> roots;
  if (list == "all") {
    for (model::NodeId v = 0; v < truth.dim(); ++v) {
      if (truth.in_degree(v) == 0) roots.push_back(v);
    }
    return roots;
  }
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    if (!names.empty()) {
      const auto it = std::find(names.begin(), names.end(), item);
      if (it == names.end()) throw InvalidInput("--remove-roots: unknown node '" + item + "'");
      roots.push_back(static_cast<model::NodeId>(it - names.begin()));
      continue;
    }
    const auto id = io::parse_double(item);
    if (!id || *id < 1 || *id > truth.dim() || *id != static_cast<int>(*id)) {
      throw InvalidInput("--remove-roots: bad node id '" + item + "'");
    }
    roots.push_back(static_cast<int>(*id) - 1);
  }
  return roots;
}

}  // namespace

int cmd_simulate(const SimulateOptions& opts) {
  simulate::SemSpec spec;
  if (opts.spec_file) spec = simulate::sem_spec_from_json(io::read_text(*opts.spec_file));
  if (opts.seed) spec.seed = *opts.seed;

  if (!opts.network) {
    if (opts.remove_roots || opts.reweight) {
      throw InvalidInput("--remove-roots and --reweight need --from-network");
    }
    spec.validate();
    const auto instance = simulate::sample_sem(spec);
    simulate::write_instance(opts.out, instance, spec);
    spdlog::info("simulated n={} p={} q={} into {}", spec.n, spec.p, spec.q, opts.out.string());
    return kOk;
  }

  const std::string network_text = io::read_text(*opts.network);
  std::istringstream network_in(network_text);
  const auto raw = io::parse_edge_list(network_in);
  const auto names = endpoint_names({&raw});
  model::Dag truth(io::resolve_edges(raw, std::nullopt, names));
  spec.p = truth.dim();
  spec.validate();
  if (opts.reweight) {
    Rng rng = Rng(spec.seed).split(kWeightStream);
    truth = model::Dag(simulate::assign_weights(truth, spec.weight_lo, spec.weight_hi, rng));
  }
  const Matrix b = simulate::draw_loading(spec);
  Rng rng = Rng(spec.seed).split(kSampleStream);
  auto instance = simulate::sample_on(truth, b, spec.noise, spec.sigma, spec.n, 1.0, rng);
  if (!names.empty()) instance.data = model::Dataset(instance.data.values(), names);

  std::vector<model::NodeId> roots;
  std::vector<model::NodeId> kept(truth.dim());
  for (int v = 0; v < truth.dim(); ++v) kept[v] = v;
  if (opts.remove_roots) {
    roots = parse_roots(*opts.remove_roots, truth, names);
    auto removal = simulate::remove_roots(instance.truth, instance.data, roots);
    if (removal.truth.dim() < 2) throw InvalidInput("--remove-roots leaves fewer than 2 nodes");
    Matrix b_kept(removal.kept.size(), b.cols());
    Matrix noise_kept(instance.noise.rows(), removal.kept.size());
    for (std::size_t a = 0; a < removal.kept.size(); ++a) {
      b_kept.row(a) = b.row(removal.kept[a]);
      noise_kept.col(a) = instance.noise.col(removal.kept[a]);
    }
    instance.truth = std::move(removal.truth);
    instance.data = std::move(removal.data);
    instance.b = std::move(b_kept);
    instance.noise = std::move(noise_kept);
    kept = std::move(removal.kept);
  }

  simulate::write_instance(opts.out, instance, spec);
  // Record where the graph came from and which columns survived.
  json j = read_json(opts.out / "spec.json");
  j["network"] = {{"source", opts.network->filename().string()},
                  {"sha256", io::sha256_hex(network_text)},
                  {"reweighted", opts.reweight}};
  json removed = json::array();
  for (auto v : roots) removed.push_back(names.empty() ? json(v + 1) : json(names[v]));
  json kept_ids = json::array();
  for (auto v : kept) kept_ids.push_back(names.empty() ? json(v + 1) : json(names[v]));
  j["network"]["removed_roots"] = removed;
  j["network"]["kept"] = kept_ids;
  io::write_text(opts.out / "spec.json", j.dump(2) + "\n");
  spdlog::info("simulated n={} from a {}-node network, {} roots removed", spec.n, spec.p, roots.size());
  return kOk;
}

}  // namespace decs::cli

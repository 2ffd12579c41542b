#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "cli/commands.hpp"
#include "cli/support.hpp"
#include "decs/error.hpp"
#include "decs/io.hpp"
#include "decs/metrics.hpp"

namespace decs::cli {
namespace {

constexpr std::uint64_t kEnvironmentStream = 7;
constexpr const char* kModes[] = {"trim", "no_trim"};

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_number(double v) { return std::isfinite(v) ? io::format_double(v) : "nan"; }

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw InvalidInput(where + ": expected an integer");
  return j.get<int>();
}

struct Scored {
  int shd = 0;
  double tpr = 0.0;
  double fdr = 0.0;
  double auc = std::numeric_limits<double>::quiet_NaN();  // NaN for an empty truth
};

Scored score_estimate(const score::SolveReport& report, const model::WeightedAdjacency& truth,
                      double threshold) {
  const auto est = model::skeleton_of(report.w_hat, threshold);
  const auto ts = model::skeleton_of(truth);
  const auto rates = metrics::tpr_fdr(est, ts);
  Scored s{metrics::shd_skeleton(est, ts), rates.tpr, rates.fdr};
  if (!ts.empty()) {
    s.auc = metrics::auc_sweep(model::WeightedAdjacency::with_zero_diagonal(report.w_raw), ts).auc;
  }
  return s;
}

// ---------------------------------------------------------------------------
// grid

struct Grid {
  std::string axis;
  json values;
  json base_json;
  simulate::SemSpec base;
  int trials = 1;
  SolverSettings solver;
  std::optional<std::string> outputs;
};

simulate::SemSpec apply_axis(simulate::SemSpec spec, const std::string& axis, const json& v,
                             const std::string& where) {
  if (axis == "p") {
    spec.p = get_int(v, where);
    // Erdos-Renyi graphs keep e = p along this axis.
    if (auto* er = std::get_if<simulate::ErGraph>(&spec.graph)) er->expected_edges = spec.p;
  } else if (axis == "q") {
    spec.q = get_int(v, where);
  } else if (axis == "sigma") {
    if (!v.is_number()) throw InvalidInput(where + ": expected a number");
    spec.sigma = v.get<double>();
  } else if (axis == "noise_family") {
    if (!v.is_string()) throw InvalidInput(where + ": expected a string");
    spec.noise = simulate::noise_family_from_string(v.get<std::string>());
  } else if (axis == "b_edges") {
    spec.b_model = simulate::SparseDagB{get_int(v, where)};
  } else {
    throw InvalidInput("grid.axis: unknown axis '" + axis + "'");
  }
  spec.validate();
  return spec;
}

std::string value_label(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return io::format_double(v.get<double>());
}

Grid grid_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("grid: expected an object");
  Grid g;
  if (!j.contains("axis") || !j["axis"].is_string()) throw InvalidInput("grid.axis: required string");
  g.axis = j["axis"].get<std::string>();
  if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
    throw InvalidInput("grid.values: required non-empty array");
  }
  g.values = j["values"];
  g.base_json = j.value("base", json::object());
  g.base = simulate::sem_spec_from_json(g.base_json.dump());
  if (j.contains("trials")) g.trials = get_int(j["trials"], "grid.trials");
  if (g.trials < 1) throw InvalidInput("grid.trials: must be >= 1");
  g.solver = solver_settings_from_json(j.value("solver", json::object()));
  if (j.contains("outputs")) g.outputs = j["outputs"].get<std::string>();
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    apply_axis(g.base, g.axis, g.values[k], "grid.values[" + std::to_string(k) + "]");
  }
  return g;
}

json grid_to_json(const Grid& g) {
  return {{"axis", g.axis},
          {"values", g.values},
          {"base", json::parse(simulate::to_json(g.base))},
          {"trials", g.trials},
          {"solver", to_json(g.solver)}};
}

struct RunRecord {
  std::size_t value_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string spec_hash;
  bool ok = false;
  std::string error;
  Scored scored;
  double lambda = 0.0;
  bool converged = false;
  double wall_time = 0.0;
};

struct Summary {
  int runs = 0;
  int failed = 0;
  double shd_mean = 0.0;
  double shd_sd = 0.0;
  double auc_mean = 0.0;
  double auc_sd = 0.0;
};

std::pair<double, double> mean_sd(const std::vector<double>& v) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

}  // namespace

int cmd_grid(const GridOptions& opts) {
  if (opts.grid_file.has_value() == opts.manifest.has_value()) {
    throw InvalidInput("give exactly one of a grid file or --manifest");
  }
  Grid grid;
  std::vector<std::uint64_t> seeds;
  if (opts.manifest) {
    const json manifest = read_json(*opts.manifest);
    if (!manifest.contains("grid") || !manifest.contains("trial_seeds")) {
      throw InvalidInput(opts.manifest->string() + ": not a grid manifest");
    }
    grid = grid_from_json(manifest["grid"]);
    seeds = manifest["trial_seeds"].get<std::vector<std::uint64_t>>();
    if (static_cast<int>(seeds.size()) != grid.trials) {
      throw InvalidInput("manifest: trial_seeds does not match trials");
    }
  } else {
    grid = grid_from_json(read_json(*opts.grid_file));
    for (int t = 0; t < grid.trials; ++t) seeds.push_back(child_seed(grid.base.seed, t));
  }
  const std::filesystem::path out = opts.out;
  std::filesystem::create_directories(out);

  const std::size_t cells = grid.values.size() * static_cast<std::size_t>(grid.trials);
  // records[cell * 2 + mode]
  std::vector<RunRecord> records(cells * 2);
  parallel_for(cells, opts.jobs, [&](std::size_t cell) {
    const std::size_t v = cell / grid.trials;
    const int t = static_cast<int>(cell % grid.trials);
    simulate::SemSpec spec = apply_axis(grid.base, grid.axis, grid.values[v], "grid.values");
    spec.seed = seeds[t];
    for (auto* r : {&records[cell * 2], &records[cell * 2 + 1]}) {
      r->value_index = v;
      r->trial = t;
      r->seed = spec.seed;
      r->spec_hash = simulate::spec_hash(spec);
    }
    std::optional<simulate::GeneratedInstance> instance;
    try {
      instance = simulate::sample_sem(spec);
    } catch (const std::exception& e) {
      for (auto* r : {&records[cell * 2], &records[cell * 2 + 1]}) r->error = e.what();
      return;
    }
    for (int mode = 0; mode < 2; ++mode) {
      RunRecord& r = records[cell * 2 + mode];
      try {
        const auto report = solve_with(instance->data, grid.solver, mode == 0);
        r.scored = score_estimate(report, instance->truth.adjacency(), grid.solver.config.edge_threshold);
        r.lambda = report.lambda_used;
        r.converged = report.converged;
        r.wall_time = report.wall_time.count();
        r.ok = true;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      spdlog::debug("value {} trial {} {}: {}", value_label(grid.values[v]), t, kModes[mode],
                    r.ok ? "ok" : r.error);
    }
  });

  int failures = 0;
  json runs = json::array();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const RunRecord& r = records[k];
    json rec{{"value", grid.values[r.value_index]},
             {"trial", r.trial},
             {"seed", r.seed},
             {"mode", kModes[k % 2]},
             {"spec_hash", r.spec_hash}};
    if (r.ok) {
      rec["shd"] = r.scored.shd;
      rec["tpr"] = num_or_null(r.scored.tpr);
      rec["fdr"] = r.scored.fdr;
      rec["auc"] = num_or_null(r.scored.auc);
      rec["lambda"] = r.lambda;
      rec["converged"] = r.converged;
      rec["wall_time"] = r.wall_time;
    } else {
      rec["error"] = r.error;
      ++failures;
    }
    runs.push_back(std::move(rec));
  }

  std::ostringstream csv;
  csv << "axis,value,mode,runs,failed,shd_mean,shd_sd,auc_mean,auc_sd\n";
  for (std::size_t v = 0; v < grid.values.size(); ++v) {
    for (int mode = 0; mode < 2; ++mode) {
      std::vector<double> shd;
      std::vector<double> auc;
      int failed = 0;
      for (int t = 0; t < grid.trials; ++t) {
        const RunRecord& r = records[(v * grid.trials + t) * 2 + mode];
        if (!r.ok) {
          ++failed;
          continue;
        }
        shd.push_back(r.scored.shd);
        if (std::isfinite(r.scored.auc)) auc.push_back(r.scored.auc);
      }
      const auto [shd_mean, shd_sd] = mean_sd(shd);
      const auto [auc_mean, auc_sd] = mean_sd(auc);
      csv << grid.axis << ',' << value_label(grid.values[v]) << ',' << kModes[mode] << ','
          << grid.trials << ',' << failed << ',' << csv_number(shd_mean) << ','
          << csv_number(shd_sd) << ',' << csv_number(auc_mean) << ',' << csv_number(auc_sd) << '\n';
    }
  }
  io::write_text(out / "aggregate.csv", csv.str());

  json manifest{{"version", version()},
                {"grid", grid_to_json(grid)},
                {"base_spec_hash", simulate::spec_hash(grid.base)},
                {"trial_seeds", seeds},
                {"runs", runs}};
  io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("grid: {} runs, {} failed", records.size(), failures);
  return failures > 0 ? kPartialFailure : kOk;
}

int cmd_reproduce(const ReproduceOptions& opts) {
  const json j = read_json(opts.spec_file);
  if (!j.is_object()) throw InvalidInput("reproduce: expected an object");
  simulate::SemSpec base = simulate::sem_spec_from_json(j.value("base", json::object()).dump());
  if (opts.seed) base.seed = *opts.seed;
  const int m = j.contains("environments") ? get_int(j["environments"], "environments") : 10;
  if (m < 2) throw InvalidInput("environments: must be >= 2");
  double lo = 0.25;
  double hi = 2.0;
  if (j.contains("sigma_range")) {
    const json& r = j["sigma_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
      throw InvalidInput("sigma_range: expected [lo, hi]");
    }
    lo = r[0].get<double>();
    hi = r[1].get<double>();
  }
  const SolverSettings solver = solver_settings_from_json(j.value("solver", json::object()));
  double threshold = solver.config.edge_threshold;
  if (j.contains("threshold")) threshold = j["threshold"].get<double>();
  base.validate();

  Rng rng = Rng(base.seed).split(kEnvironmentStream);
  const auto envs = simulate::gen_environments(base, m, lo, hi, rng);
  std::filesystem::create_directories(opts.out);

  struct EnvRun {
    bool ok = false;
    std::string error;
    model::Skeleton skeleton;
    double lambda = 0.0;
    bool converged = false;
  };
  std::vector<EnvRun> runs(static_cast<std::size_t>(m) * 2);
  parallel_for(runs.size(), opts.jobs, [&](std::size_t k) {
    const auto& inst = envs.instances[k / 2];
    EnvRun& r = runs[k];
    try {
      const auto report = solve_with(inst.data, solver, k % 2 == 0);
      r.skeleton = model::skeleton_of(report.w_hat, threshold);
      r.lambda = report.lambda_used;
      r.converged = report.converged;
      r.ok = true;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  int failures = 0;
  bool undefined = false;
  json summary{{"version", version()},
               {"spec_hash", simulate::spec_hash(base)},
               {"seed", base.seed},
               {"sigma_range", {lo, hi}},
               {"threshold", threshold}};
  std::vector<std::vector<double>> curves(2);
  for (int mode = 0; mode < 2; ++mode) {
    std::vector<model::Skeleton> skeletons;
    json envs_json = json::array();
    for (int e = 0; e < m; ++e) {
      const EnvRun& r = runs[static_cast<std::size_t>(e) * 2 + mode];
      json rec{{"latent_scale", envs.latent_scales[e]}};
      if (r.ok) {
        skeletons.push_back(r.skeleton);
        rec["edges"] = r.skeleton.size();
        rec["lambda"] = r.lambda;
        rec["converged"] = r.converged;
      } else {
        rec["error"] = r.error;
        ++failures;
      }
      envs_json.push_back(std::move(rec));
    }
    summary[kModes[mode]]["environments"] = envs_json;
    try {
      if (skeletons.size() < 2) throw InvalidInput("fewer than 2 successful environments");
      curves[mode] = metrics::reproducibility_curve(skeletons);
      summary[kModes[mode]]["curve"] = curves[mode];
    } catch (const UndefinedMetric& e) {
      undefined = true;
      summary[kModes[mode]]["error"] = e.what();
    } catch (const InvalidInput& e) {
      summary[kModes[mode]]["error"] = e.what();
    }
  }

  std::ostringstream csv;
  csv << "k,trim,no_trim\n";
  const std::size_t rows = std::max(curves[0].size(), curves[1].size());
  for (std::size_t k = 0; k < rows; ++k) {
    csv << k + 1;
    for (const auto& c : curves) csv << ',' << (k < c.size() ? io::format_double(c[k]) : "nan");
    csv << '\n';
  }
  io::write_text(opts.out / "reproducibility.csv", csv.str());
  if (!curves[0].empty() && !curves[1].empty()) {
    summary["trim_at_m"] = curves[0].back();
    summary["no_trim_at_m"] = curves[1].back();
    summary["trim_more_reproducible"] = curves[0].back() > curves[1].back();
  }
  io::write_text(opts.out / "summary.json", summary.dump(2) + "\n");

  if (undefined) return kUndefinedMetric;
  return failures > 0 ? kPartialFailure : kOk;
}

}  // namespace decs::cli

#include "cli/support.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "decs/error.hpp"
#include "decs/io.hpp"
#include "decs/rng.hpp"

#ifndef DECS_VERSION
#define DECS_VERSION "0.0.0"
#endif

namespace decs::cli {

std::string version() { return DECS_VERSION; }

json read_json(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

namespace {

template <typename T>
void take(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("solver.") + key + ": wrong type");
  }
}

}  // namespace

SolverSettings solver_settings_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("solver: expected an object");
  static const char* const kKeys[] = {"lambda",   "use_trim",       "rho_init",   "rho_max",
                                      "alpha_init", "h_tol",        "progress_ratio",
                                      "max_outer", "inner_tol",     "inner_max_iter",
                                      "edge_threshold"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw InvalidInput("solver." + key + ": unknown field");
  }
  SolverSettings s;
  if (j.contains("lambda")) {
    const json& l = j.at("lambda");
    if (l.is_number()) {
      s.lambda = l.get<double>();
    } else if (!(l.is_string() && l.get<std::string>() == "auto")) {
      throw InvalidInput("solver.lambda: expected a number or \"auto\"");
    }
  }
  auto& c = s.config;
  take(j, "use_trim", c.use_trim);
  take(j, "rho_init", c.rho_init);
  take(j, "rho_max", c.rho_max);
  take(j, "alpha_init", c.alpha_init);
  take(j, "h_tol", c.h_tol);
  take(j, "progress_ratio", c.progress_ratio);
  take(j, "max_outer", c.max_outer);
  take(j, "inner_tol", c.inner_tol);
  take(j, "inner_max_iter", c.inner_max_iter);
  take(j, "edge_threshold", c.edge_threshold);
  if (s.lambda) c.lambda = *s.lambda;
  c.validate();
  return s;
}

json to_json(const SolverSettings& s) {
  const auto& c = s.config;
  json j;
  j["lambda"] = s.lambda ? json(*s.lambda) : json("auto");
  j["rho_init"] = c.rho_init;
  j["rho_max"] = c.rho_max;
  j["alpha_init"] = c.alpha_init;
  j["h_tol"] = c.h_tol;
  j["progress_ratio"] = c.progress_ratio;
  j["max_outer"] = c.max_outer;
  j["inner_tol"] = c.inner_tol;
  j["inner_max_iter"] = c.inner_max_iter;
  j["edge_threshold"] = c.edge_threshold;
  return j;
}

score::SolveReport solve_with(const model::Dataset& data, const SolverSettings& s, bool use_trim) {
  score::ScoreConfig cfg = s.config;
  cfg.use_trim = use_trim;
  const Matrix x_tilde = score::adjusted_data(data.values(), use_trim);
  cfg.lambda = s.lambda ? *s.lambda : score::default_lambda(x_tilde);
  return score::solve_adjusted(x_tilde, cfg);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::string> endpoint_names(const std::vector<const std::vector<io::RawEdge>*>& lists) {
  auto is_id = [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos &&
           s.front() != '0';
  };
  bool all_ids = true;
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto* list : lists) {
    for (const auto& e : *list) {
      for (const std::string* end : {&e.source, &e.target}) {
        all_ids = all_ids && is_id(*end);
        if (seen.insert(*end).second) names.push_back(*end);
      }
    }
  }
  if (all_ids) return {};
  return names;
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return Rng(seed).split(index).next_u64();
}

}  // namespace decs::cli

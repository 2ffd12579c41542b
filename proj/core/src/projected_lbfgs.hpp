#pragma once

#include <functional>

#include "decs/linalg.hpp"

namespace decs::optim {

/// Objective callback: returns f(x) and writes the gradient. May return +inf
/// (e.g. on overflow), which the line search treats as a rejected step.
using Objective = std::function<double(const Vector& x, Vector& gradient)>;

struct PqnOptions {
  double pg_tol = 1e-6;     // stop when ||projected gradient||_inf <= pg_tol
  double f_rel_tol = 2.2e-9;  // or when the relative decrease stalls below this
  int max_iter = 500;
  int memory = 10;
  double armijo = 1e-4;
  int max_backtracks = 60;
};

struct PqnResult {
  Vector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  double pg_norm = 0.0;
};

/// Projected limited-memory quasi-Newton for min f(x) s.t. x >= 0, with the
/// entries where `fixed` is true pinned at zero.
///
/// Each iteration splits the variables into the active set (at the bound with
/// a positive gradient) and the free set, takes an L-BFGS direction on the free
/// set and runs a projected Armijo backtracking search along it.
PqnResult minimize_nonnegative(const Objective& objective, Vector x0,
                               const Eigen::Array<bool, Eigen::Dynamic, 1>& fixed,
                               const PqnOptions& options);

}  // namespace decs::optim

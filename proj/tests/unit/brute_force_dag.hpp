#pragma once

#include <Eigen/Dense>

// Exhaustive search over every DAG on a handful of nodes. Each structure is
// fit by per-node ordinary least squares on its parent set and scored with
// the penalised least-squares objective. Independent of the library solver.
namespace decs_test {

struct BruteForceResult {
  Eigen::MatrixXd weights;  // OLS weights of the best structure
  double score = 0.0;
  int structures = 0;  // number of acyclic supports visited
};

BruteForceResult brute_force_dag(const Eigen::MatrixXd& x, double lambda);

// (1/2n) ||X - XW||_F^2 + lambda * sum |w_ij|, written out entry by entry.
double penalised_score(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double lambda);

// True when some ordering of the nodes puts every edge forward. Tries all
// permutations, so only for tiny p.
bool acyclic_by_permutation(const Eigen::MatrixXd& w);

}  // namespace decs_test

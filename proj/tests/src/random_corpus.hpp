#pragma once

// Deterministic random formulas and trajectories shared by the suites.
// Everything is seeded mt19937, so failures reproduce exactly.

#include <Eigen/Core>
#include <random>
#include <utility>
#include <vector>

#include "stlccp/formula.hpp"
#include "stlccp/trajectory.hpp"

namespace corpus {

inline stlccp::Predicate random_predicate(std::mt19937& gen, int dim) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  stlccp::Predicate p;
  p.a = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) p.a[i] = coef(gen);
  if (p.a.lpNorm<Eigen::Infinity>() < 1e-3) p.a[0] = 1.0;
  p.b = coef(gen);
  return p;
}

// Depth-bounded random formula whose leaves stay within `budget` steps of
// the evaluation time, so a horizon == budget trajectory never underruns.
inline stlccp::Formula random_formula(std::mt19937& gen, int dim, int depth,
                                      int budget) {
  using stlccp::Formula;
  const bool leaf_only = depth <= 0 || budget < 1;
  std::uniform_int_distribution<int> pick(0, leaf_only ? 0 : 5);
  const int kind = pick(gen);
  if (kind == 0) {
    return Formula::pred(random_predicate(gen, dim));
  }
  if (kind == 1 || kind == 2) {
    std::uniform_int_distribution<int> arity(2, 3);
    std::vector<Formula> kids;
    const int n = arity(gen);
    kids.reserve(n);
    for (int i = 0; i < n; ++i) {
      kids.push_back(random_formula(gen, dim, depth - 1, budget));
    }
    return kind == 1 ? Formula::conj(std::move(kids))
                     : Formula::disj(std::move(kids));
  }
  std::uniform_int_distribution<int> hi(1, budget);
  const int t2 = hi(gen);
  std::uniform_int_distribution<int> lo(0, t2 - 1);
  const int t1 = lo(gen);
  Formula child = random_formula(gen, dim, depth - 1, budget - t2);
  switch (kind) {
    case 3:
      return Formula::always(t1, t2, std::move(child));
    case 4:
      return Formula::eventually(t1, t2, std::move(child));
    default: {
      Formula rhs = random_formula(gen, dim, depth - 1, budget - t2);
      return Formula::until(t1, t2, std::move(child), std::move(rhs));
    }
  }
}

inline stlccp::Trajectory random_trajectory(std::mt19937& gen, int horizon,
                                            int dim) {
  std::uniform_real_distribution<double> entry(-5.0, 5.0);
  stlccp::Trajectory traj;
  traj.states = Eigen::MatrixXd::Zero(horizon + 1, dim);
  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < dim; ++i) traj.states(t, i) = entry(gen);
  }
  return traj;
}

}  // namespace corpus

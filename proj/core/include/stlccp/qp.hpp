#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <string>

namespace stlccp {

// Convex quadratic program
//   minimize    0.5 z'Pz + q'z
//   subject to  A z = b,   G z <= h
// P must be symmetric positive semidefinite (zero for an LP).
struct QpProblem {
  Eigen::SparseMatrix<double> P;
  Eigen::VectorXd q;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G;
  Eigen::VectorXd h;

  int var_count() const { return static_cast<int>(q.size()); }
};

enum class QpStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(QpStatus status);

struct QpSolution {
  QpStatus status = QpStatus::MaxIter;
  Eigen::VectorXd z;
  Eigen::VectorXd y;  // multipliers, stacked [equalities; inequalities]
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool polished = false;
};

struct QpSettings {
  double eps_primal = 1e-8;
  double eps_dual = 1e-8;
  double eps_infeasible = 1e-9;
  int max_iter = 20000;
  double rho = 0.1;        // dual step; equality rows use a stiffer value
  double sigma = 1e-6;     // primal regularization
  double alpha = 1.6;      // over-relaxation
  int check_every = 25;    // residual / certificate test period
  bool adaptive_rho = true;
  bool polish = true;
  bool scale = true;       // Ruiz equilibration
};

struct QpWarmStart {
  Eigen::VectorXd z;
  Eigen::VectorXd y;
};

// Operator-splitting solver (ADMM on the problem above) with an active-set
// polish pass once the iteration settles.  Deterministic: fixed iteration
// order, no pivoting or randomized steps, so identical inputs give
// identical outputs.  Infeasibility and unboundedness are detected through
// the divergence certificates of the dual and primal updates.
QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings = {},
                    const std::optional<QpWarmStart>& warm = std::nullopt);

}  // namespace stlccp

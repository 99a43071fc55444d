#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "stlccp/dc_program.hpp"
#include "stlccp/qp.hpp"
#include "stlccp/smoothers.hpp"
#include "stlccp/trajectory.hpp"

namespace stlccp {

// How the penalty on a relaxed concave constraint is weighted.
//   Twp    - by the leaf count of the constraint's subtree (tree-weighted)
//   Normal - every constraint gets the smallest leaf count (flat)
//   Decay  - starts at the tree weight and decays geometrically toward the
//            flat weight as iterations progress
enum class PenaltyMode { Twp, Normal, Decay };

struct CcpConfig {
  PenaltyMode mode = PenaltyMode::Twp;
  double decay_rate = 0.2;          // Decay mode only
  Smoother smoother = Smoother::lse(10.0);
  double k_lse = 10.0;              // warm-start pipeline stage 1
  double k_mellow = 1000.0;         // warm-start pipeline stage 2
  double tau0 = 5e-3;               // initial penalty scale
  double mu = 2.0;                  // penalty growth factor
  double tau_max = 1e3;             // penalty ceiling
  double s_terminal = 1e-5;         // max allowed slack at convergence
  double cost_eps = 1e-2;           // max cost change at convergence
  int max_iter = 25;
  unsigned seed = 0;                // trajectory initialization
  double init_sigma = 0.1;          // stddev of the random initialization
  // Subproblem tolerances.  The outer loop only needs slacks resolved to
  // s_terminal, so the inner solver runs looser than its stand-alone default.
  QpSettings qp{.eps_primal = 1e-6, .eps_dual = 1e-6};
};

// Snapshot of the outer loop before solving subproblem `iter`;
// tau == min(tau0 * mu^iter, tau_max).
struct CcpState {
  Eigen::VectorXd z;  // current iterate over program + penalty variables
  double tau = 0.0;
  int iter = 0;
};

enum class SolveStatus { Converged, MaxIterExceeded, SubproblemFailed };

const char* to_string(SolveStatus status);

struct IterationRecord {
  int iter = 0;
  double tau = 0.0;
  double cost = 0.0;         // program cost at the iterate (no penalty term)
  double max_penalty = 0.0;  // largest slack variable
  QpStatus qp_status = QpStatus::MaxIter;
  int qp_iters = 0;
  double wall_ms = 0.0;
  int stage = 1;  // warm-start pipeline stage that produced the record
};

struct SolveResult {
  SolveStatus status = SolveStatus::SubproblemFailed;
  Trajectory trajectory;
  double objective = 0.0;    // final program cost (top bound + effort term)
  double sxi = 0.0;          // final top bound value
  double max_penalty = 0.0;
  int iterations = 0;
  std::vector<IterationRecord> history;
  // Post-hoc acceptance test for mellowmin runs: with w concave constraints
  // each allowed slack s_terminal, a final top bound below -w * s_terminal
  // certifies the exact specification is met.
  bool sound_certified = false;
  int stage = 1;
  double wall_ms = 0.0;
  Eigen::VectorXd z;  // final variable vector (program + penalties)
  Eigen::VectorXd y;  // final multipliers from the last subproblem
};

// First-order expansion of smoother(args) at the point z.  Concavity makes
// it a global over-estimator: the returned expression evaluates >= the
// smoothed min everywhere and equals it at z.  ExactMin is not
// differentiable and is rejected.
AffExpr linearize_concave(const ConcaveConstraint& c,
                          const Eigen::Ref<const Eigen::VectorXd>& z,
                          Smoother smoother);

// Penalty weight of constraint `c` at outer iteration `iter` (1-based).
// `min_weight` is the smallest constraint weight in the program.
double penalty_weight(const ConcaveConstraint& c, PenaltyMode mode, int iter,
                      int min_weight, double decay_rate = 0.2);
double penalty_weight(const ConcaveConstraint& c, PenaltyMode mode, int iter,
                      const TreeStats& stats, double decay_rate = 0.2);

// Convex subproblem at the given state: every concave constraint j is
// replaced by  linearization - bound <= s_j, s_j >= 0, and the cost gains
// tau * sum_j weight_j * s_j.  Affine rows are copied bit-for-bit, so only
// the linearized block differs between iterations.
QpProblem assemble_subproblem(const DcProgram& p, const CcpState& state,
                              const CcpConfig& cfg);

// Penalty convex-concave loop.  Starts from `init` when given, otherwise
// from a seeded Gaussian trajectory; auxiliary variables always come from a
// smoothed bottom-up evaluation at the starting trajectory.  Stops as
// converged when both the largest slack is at most s_terminal and the cost
// moved less than cost_eps since the previous iteration.
SolveResult run_ccp(const DcProgram& p, const CcpConfig& cfg,
                    const std::optional<Trajectory>& init = std::nullopt);

// Two-stage schedule: a forgiving log-sum-exp pass (k_lse) followed by a
// near-exact mellowmin pass (k_mellow) started from the first pass's
// trajectory.  The second stage's result is the pipeline's result; stage 1
// is returned alongside for inspection.  A stage-1 subproblem failure
// short-circuits and is returned tagged as stage 1.
struct WarmStartResult {
  SolveResult stage1;
  SolveResult stage2;
  const SolveResult& final() const {
    return stage1.status == SolveStatus::SubproblemFailed ? stage1 : stage2;
  }
};
WarmStartResult warm_start_pipeline(const DcProgram& p, const CcpConfig& cfg);

}  // namespace stlccp

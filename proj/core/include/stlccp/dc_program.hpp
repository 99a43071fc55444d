#pragma once

#include <Eigen/Core>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "stlccp/smoothers.hpp"
#include "stlccp/system.hpp"
#include "stlccp/tree.hpp"
#include "stlccp/trajectory.hpp"

namespace stlccp {

// One decision variable of the difference-of-convex program.  `ordinal` is
// the dense column index used by affine expressions and the QP matrices.
struct VarId {
  enum class Role { State, Input, SxTop, SMax, SMin, Penalty };
  Role role;
  int a = 0;  // State/Input: time step t; SMax/SMin/Penalty: running index
  int b = 0;  // State/Input: coordinate within the step
  int ordinal = -1;

  std::string name() const;
};

// Sparse affine expression sum_i coeff_i * z_i + constant.  Coefficients
// are keyed by variable ordinal; zero coefficients are never stored.
class AffExpr {
 public:
  AffExpr() = default;
  explicit AffExpr(double constant) : constant_(constant) {}
  static AffExpr variable(int ordinal, double coeff = 1.0);

  void add_term(int ordinal, double coeff);
  void add_constant(double c) { constant_ += c; }
  AffExpr& operator+=(const AffExpr& other);
  AffExpr& operator-=(const AffExpr& other);
  AffExpr& operator*=(double s);

  double constant() const { return constant_; }
  const std::map<int, double>& coeffs() const { return coeffs_; }
  bool is_constant() const { return coeffs_.empty(); }

  double eval(const Eigen::Ref<const Eigen::VectorXd>& z) const;

 private:
  std::map<int, double> coeffs_;
  double constant_ = 0.0;
};

enum class RowOrigin { InitialState, Dynamics, StateBox, InputBox, TopBound, MaxRow };

const char* to_string(RowOrigin origin);

// Equality rows read expr == 0, inequality rows expr <= 0.
struct Row {
  AffExpr expr;
  RowOrigin origin;
};

// min(args) <= bound with affine args: the single concave piece the program
// owns per disjunctive tree node.  `weight` is the leaf count of that node's
// subtree (drives the tree-weighted penalty), `node_id` its preorder index
// in the simplified tree.
struct ConcaveConstraint {
  std::vector<AffExpr> args;
  AffExpr bound;   // always a bare auxiliary variable
  int bound_ordinal = -1;
  int weight = 1;
  int node_id = -1;
};

struct QuadCost {
  Eigen::MatrixXd Q;  // n x n, PSD
  Eigen::MatrixXd R;  // m x m, PSD
  double weight = 0.0;
};

enum class TopKind { MaxTop, MinTop };

// Defining expressions of one auxiliary variable: a max-type auxiliary
// equals (at the optimum) the max of its row expressions, a min-type one
// the min of the concave constraint's arguments.  Stored children before
// parents, so one forward sweep resolves values bottom-up.
struct AuxDef {
  int ordinal = -1;
  bool is_max = true;
  std::vector<AffExpr> exprs;
};

// Epigraph form of the reversed-robustness synthesis problem:
//   minimize  s_xi (+ quadratic effort cost)
//   s.t.      eq_rows = 0, ineq_rows <= 0, concave constraints
// Every convex row is affine; all non-convexity is isolated in the
// min(args) <= bound constraints (one per disjunctive node).
struct DcProgram {
  std::vector<VarId> vars;
  AffExpr cost_linear;  // the top bound variable s_xi
  std::optional<QuadCost> cost_quadratic;
  std::vector<Row> eq_rows;
  std::vector<Row> ineq_rows;
  std::vector<ConcaveConstraint> concave;
  std::vector<AuxDef> aux_defs;
  TopKind top_kind = TopKind::MaxTop;

  int horizon = 0;
  int state_dim = 0;
  int input_dim = 0;
  int sxi_ordinal = -1;

  int var_count() const { return static_cast<int>(vars.size()); }
  int state_ordinal(int t, int i) const;
  int input_ordinal(int t, int j) const;

  // Scatters a trajectory into / gathers it out of a full variable vector.
  void set_trajectory(Eigen::VectorXd& z, const Trajectory& traj) const;
  Trajectory extract_trajectory(const Eigen::Ref<const Eigen::VectorXd>& z) const;
};

// Builds the program from a *simplified* tree: dynamics and initial-state
// equalities, box rows, s_xi <= 0, one row per max-node child bounding it by
// the node's auxiliary, and one concave constraint per min node.  Max
// children of min nodes get SMax auxiliaries; predicate children stay
// inline.  `x0_pinned` masks which initial-state coordinates get equality
// rows (all, by default).
DcProgram decompose(const RobustnessTree& tree, const LinearSystem& system,
                    const Eigen::VectorXd& x0, int horizon,
                    const Bounds& bounds = Bounds::unbounded(),
                    std::optional<QuadCost> quad = std::nullopt,
                    const std::vector<bool>& x0_pinned = {});

// Structural checks on a built program: equality rows touch only state and
// input variables, the concave-constraint count equals the disjunctive node
// count of the tree, and every auxiliary is wired both as a bound and as an
// argument.  Also tallies rows by origin.
struct AuditReport {
  bool passed = false;
  std::vector<std::string> violations;
  std::map<RowOrigin, int> rows_by_origin;
  int eq_row_count = 0;
  int ineq_row_count = 0;
  int concave_count = 0;

  std::string to_string() const;
};
AuditReport structural_audit(const DcProgram& p, const TreeStats& stats);

// Minimum feasible s_xi once the trajectory variables are fixed: resolves
// the auxiliary chain bottom-up (every row and concave constraint is
// monotone in its bound, so the least fixed point is the optimum of the
// residual program).  Equals the exact reversed robustness of the tree the
// program was built from.  Throws std::invalid_argument when the fixed
// trajectory violates dynamics or box rows beyond `feas_tol`.
double min_sxi_for_fixed_traj(const DcProgram& p, const Trajectory& traj,
                              double feas_tol = 1e-7);

// Fills the auxiliary entries of z from its trajectory entries by a
// forward sweep over aux_defs, applying `smoother` at min-type auxiliaries.
// With the exact smoother this reproduces the residual-program optimum;
// the CCP uses it to seed auxiliaries at the initial trajectory.
void propagate_aux(const DcProgram& p, Eigen::VectorXd& z,
                   const Smoother& smoother);

nlohmann::json dc_program_to_json(const DcProgram& p);

}  // namespace stlccp

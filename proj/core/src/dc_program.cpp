#include "stlccp/dc_program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stlccp/simplify.hpp"

namespace stlccp {

std::string VarId::name() const {
  switch (role) {
    case Role::State:
      return "x[" + std::to_string(a) + "][" + std::to_string(b) + "]";
    case Role::Input:
      return "u[" + std::to_string(a) + "][" + std::to_string(b) + "]";
    case Role::SxTop:
      return "s_xi";
    case Role::SMax:
      return "s_max[" + std::to_string(a) + "]";
    case Role::SMin:
      return "s_min[" + std::to_string(a) + "]";
    case Role::Penalty:
      return "pen[" + std::to_string(a) + "]";
  }
  return "?";
}

AffExpr AffExpr::variable(int ordinal, double coeff) {
  AffExpr e;
  e.add_term(ordinal, coeff);
  return e;
}

void AffExpr::add_term(int ordinal, double coeff) {
  if (coeff == 0.0) return;
  auto [it, inserted] = coeffs_.try_emplace(ordinal, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) coeffs_.erase(it);
  }
}

AffExpr& AffExpr::operator+=(const AffExpr& other) {
  for (const auto& [ord, c] : other.coeffs_) add_term(ord, c);
  constant_ += other.constant_;
  return *this;
}

AffExpr& AffExpr::operator-=(const AffExpr& other) {
  for (const auto& [ord, c] : other.coeffs_) add_term(ord, -c);
  constant_ -= other.constant_;
  return *this;
}

AffExpr& AffExpr::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    constant_ = 0.0;
    return *this;
  }
  for (auto& [ord, c] : coeffs_) c *= s;
  constant_ *= s;
  return *this;
}

double AffExpr::eval(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  double v = constant_;
  for (const auto& [ord, c] : coeffs_) v += c * z[ord];
  return v;
}

const char* to_string(RowOrigin origin) {
  switch (origin) {
    case RowOrigin::InitialState: return "initial-state";
    case RowOrigin::Dynamics: return "dynamics";
    case RowOrigin::StateBox: return "state-box";
    case RowOrigin::InputBox: return "input-box";
    case RowOrigin::TopBound: return "top-bound";
    case RowOrigin::MaxRow: return "max-row";
  }
  return "?";
}

int DcProgram::state_ordinal(int t, int i) const {
  return t * state_dim + i;
}

int DcProgram::input_ordinal(int t, int j) const {
  return (horizon + 1) * state_dim + t * input_dim + j;
}

void DcProgram::set_trajectory(Eigen::VectorXd& z, const Trajectory& traj) const {
  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < state_dim; ++i) {
      z[state_ordinal(t, i)] = traj.states(t, i);
    }
  }
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < input_dim; ++j) {
      z[input_ordinal(t, j)] = traj.inputs(t, j);
    }
  }
}

Trajectory DcProgram::extract_trajectory(
    const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Trajectory traj;
  traj.states.resize(horizon + 1, state_dim);
  traj.inputs.resize(horizon, input_dim);
  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < state_dim; ++i) {
      traj.states(t, i) = z[state_ordinal(t, i)];
    }
  }
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < input_dim; ++j) {
      traj.inputs(t, j) = z[input_ordinal(t, j)];
    }
  }
  return traj;
}

namespace {

using Kind = RobustnessTree::Kind;

// Walks the simplified tree and accumulates the program.  Node ids follow
// the same preorder numbering tree_stats uses, so constraint weights can be
// looked up directly.  Auxiliary definitions are pushed in post-order
// (children first), which makes a forward sweep over them bottom-up.
class Builder {
 public:
  Builder(DcProgram& p, const TreeStats& stats) : p_(p), stats_(stats) {}

  void top(const RobustnessTree& node) {
    int id = next_id_++;
    switch (node.kind()) {
      case Kind::Leaf: {
        // Degenerate max top of arity one: a single row bounds s_xi.
        std::vector<AffExpr> exprs{leaf_expr(node)};
        push_max_row(exprs.front(), p_.sxi_ordinal);
        p_.aux_defs.push_back({p_.sxi_ordinal, true, std::move(exprs)});
        p_.top_kind = TopKind::MaxTop;
        break;
      }
      case Kind::Max: {
        std::vector<AffExpr> exprs;
        for (const auto& c : node.children()) {
          max_child(c, p_.sxi_ordinal, exprs);
        }
        p_.aux_defs.push_back({p_.sxi_ordinal, true, std::move(exprs)});
        p_.top_kind = TopKind::MaxTop;
        break;
      }
      case Kind::Min: {
        if (node.arity() == 1) {
          // Pass-through: the wrapper contributes nothing, its child is the
          // effective top.
          top(node.children().front());
          return;
        }
        emit_concave(node, id, p_.sxi_ordinal);
        p_.top_kind = TopKind::MinTop;
        break;
      }
    }
  }

 private:
  AffExpr leaf_expr(const RobustnessTree& leaf) {
    const Predicate& pred = leaf.predicate();
    AffExpr e(-pred.b);
    for (int i = 0; i < pred.a.size(); ++i) {
      e.add_term(p_.state_ordinal(leaf.time(), i), pred.a[i]);
    }
    return e;
  }

  void push_max_row(const AffExpr& child_expr, int bound) {
    AffExpr row = child_expr;
    row.add_term(bound, -1.0);
    p_.ineq_rows.push_back({std::move(row), RowOrigin::MaxRow});
  }

  int new_aux(VarId::Role role) {
    int ordinal = p_.var_count();
    int index = role == VarId::Role::SMax ? n_smax_++ : n_smin_++;
    p_.vars.push_back({role, index, 0, ordinal});
    return ordinal;
  }

  // Child of a max node bounded by `bound`; appends the child's defining
  // expression(s) to `exprs`.
  void max_child(const RobustnessTree& node, int bound,
                 std::vector<AffExpr>& exprs) {
    int id = next_id_++;
    switch (node.kind()) {
      case Kind::Leaf: {
        AffExpr e = leaf_expr(node);
        push_max_row(e, bound);
        exprs.push_back(std::move(e));
        break;
      }
      case Kind::Max:
        // Only reachable through arity-1 pass-throughs: max(...) <= bound
        // expands row-by-row in place, no new variable.
        for (const auto& c : node.children()) max_child(c, bound, exprs);
        break;
      case Kind::Min: {
        if (node.arity() == 1) {
          max_child(node.children().front(), bound, exprs);
          break;
        }
        int s_min = new_aux(VarId::Role::SMin);
        AffExpr e = AffExpr::variable(s_min);
        push_max_row(e, bound);
        exprs.push_back(std::move(e));
        emit_concave(node, id, s_min);
        break;
      }
    }
  }

  // Argument of a min node; appends the affine argument(s) to `args`.
  void min_arg(const RobustnessTree& node, std::vector<AffExpr>& args) {
    int id = next_id_++;
    switch (node.kind()) {
      case Kind::Leaf:
        args.push_back(leaf_expr(node));
        break;
      case Kind::Max: {
        if (node.arity() == 1) {
          min_arg(node.children().front(), args);
          break;
        }
        int s_max = new_aux(VarId::Role::SMax);
        args.push_back(AffExpr::variable(s_max));
        std::vector<AffExpr> child_exprs;
        for (const auto& c : node.children()) {
          max_child(c, s_max, child_exprs);
        }
        p_.aux_defs.push_back({s_max, true, std::move(child_exprs)});
        break;
      }
      case Kind::Min:
        // Only reachable through arity-1 pass-throughs: min args flatten
        // into the enclosing constraint (min of min).
        for (const auto& c : node.children()) min_arg(c, args);
        break;
    }
  }

  void emit_concave(const RobustnessTree& node, int id, int bound) {
    ConcaveConstraint c;
    for (const auto& child : node.children()) min_arg(child, c.args);
    c.bound = AffExpr::variable(bound);
    c.bound_ordinal = bound;
    c.node_id = id;
    c.weight = stats_.leaf_count_per_node.at(id);
    p_.aux_defs.push_back({bound, false, c.args});
    p_.concave.push_back(std::move(c));
  }

  DcProgram& p_;
  const TreeStats& stats_;
  int next_id_ = 0;
  int n_smax_ = 0;
  int n_smin_ = 0;
};

}  // namespace

DcProgram decompose(const RobustnessTree& tree, const LinearSystem& system,
                    const Eigen::VectorXd& x0, int horizon, const Bounds& bounds,
                    std::optional<QuadCost> quad,
                    const std::vector<bool>& x0_pinned) {
  if (!is_simplified(tree)) {
    throw std::invalid_argument(
        "decompose needs a simplified tree (same-kind parent/child pairs found)");
  }
  const int n = system.state_dim();
  const int m = system.input_dim();
  if (system.A.rows() != n || system.A.cols() != n || system.B.rows() != n) {
    throw std::invalid_argument("inconsistent system matrix shapes");
  }
  if (x0.size() != n) {
    throw std::invalid_argument("x0 dimension does not match the system");
  }
  if (!x0_pinned.empty() && static_cast<int>(x0_pinned.size()) != n) {
    throw std::invalid_argument("x0_pinned mask must have one entry per state");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (max_leaf_time(tree) > horizon) {
    throw HorizonError("horizon " + std::to_string(horizon) +
                       " too short: tree has a leaf at t=" +
                       std::to_string(max_leaf_time(tree)));
  }

  DcProgram p;
  p.horizon = horizon;
  p.state_dim = n;
  p.input_dim = m;

  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      p.vars.push_back({VarId::Role::State, t, i, p.var_count()});
    }
  }
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < m; ++j) {
      p.vars.push_back({VarId::Role::Input, t, j, p.var_count()});
    }
  }
  p.sxi_ordinal = p.var_count();
  p.vars.push_back({VarId::Role::SxTop, 0, 0, p.sxi_ordinal});
  p.cost_linear = AffExpr::variable(p.sxi_ordinal);
  p.cost_quadratic = std::move(quad);
  if (p.cost_quadratic) {
    if (p.cost_quadratic->Q.rows() != n || p.cost_quadratic->R.rows() != m) {
      throw std::invalid_argument("quadratic cost shapes do not match the system");
    }
  }

  // initial state (pinned coordinates only) and dynamics equalities
  for (int i = 0; i < n; ++i) {
    if (!x0_pinned.empty() && !x0_pinned[i]) continue;
    AffExpr row(-x0[i]);
    row.add_term(p.state_ordinal(0, i), 1.0);
    p.eq_rows.push_back({std::move(row), RowOrigin::InitialState});
  }
  for (int t = 0; t < horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      AffExpr row;
      row.add_term(p.state_ordinal(t + 1, i), 1.0);
      for (int j = 0; j < n; ++j) {
        row.add_term(p.state_ordinal(t, j), -system.A(i, j));
      }
      for (int j = 0; j < m; ++j) {
        row.add_term(p.input_ordinal(t, j), -system.B(i, j));
      }
      p.eq_rows.push_back({std::move(row), RowOrigin::Dynamics});
    }
  }

  // box rows; infinite bounds contribute nothing
  auto finite = [](double v) { return std::isfinite(v); };
  for (int t = 0; t <= horizon; ++t) {
    for (int i = 0; i < n; ++i) {
      if (bounds.state_hi.size() > 0 && finite(bounds.state_hi[i])) {
        AffExpr row(-bounds.state_hi[i]);
        row.add_term(p.state_ordinal(t, i), 1.0);
        p.ineq_rows.push_back({std::move(row), RowOrigin::StateBox});
      }
      if (bounds.state_lo.size() > 0 && finite(bounds.state_lo[i])) {
        AffExpr row(bounds.state_lo[i]);
        row.add_term(p.state_ordinal(t, i), -1.0);
        p.ineq_rows.push_back({std::move(row), RowOrigin::StateBox});
      }
    }
    for (const auto& extra : bounds.state_rows) {
      AffExpr row(-extra.b);
      for (int i = 0; i < n; ++i) row.add_term(p.state_ordinal(t, i), extra.a[i]);
      p.ineq_rows.push_back({std::move(row), RowOrigin::StateBox});
    }
  }
  for (int t = 0; t < horizon; ++t) {
    for (int j = 0; j < m; ++j) {
      if (bounds.input_hi.size() > 0 && finite(bounds.input_hi[j])) {
        AffExpr row(-bounds.input_hi[j]);
        row.add_term(p.input_ordinal(t, j), 1.0);
        p.ineq_rows.push_back({std::move(row), RowOrigin::InputBox});
      }
      if (bounds.input_lo.size() > 0 && finite(bounds.input_lo[j])) {
        AffExpr row(bounds.input_lo[j]);
        row.add_term(p.input_ordinal(t, j), -1.0);
        p.ineq_rows.push_back({std::move(row), RowOrigin::InputBox});
      }
    }
    for (const auto& extra : bounds.input_rows) {
      AffExpr row(-extra.b);
      for (int j = 0; j < m; ++j) row.add_term(p.input_ordinal(t, j), extra.a[j]);
      p.ineq_rows.push_back({std::move(row), RowOrigin::InputBox});
    }
  }

  // the satisfaction constraint on the top bound
  p.ineq_rows.push_back(
      {AffExpr::variable(p.sxi_ordinal), RowOrigin::TopBound});

  TreeStats stats = tree_stats(tree);
  Builder(p, stats).top(tree);
  return p;
}

void propagate_aux(const DcProgram& p, Eigen::VectorXd& z,
                   const Smoother& smoother) {
  for (const auto& def : p.aux_defs) {
    if (def.is_max) {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& e : def.exprs) v = std::max(v, e.eval(z));
      z[def.ordinal] = v;
    } else {
      Eigen::VectorXd vals(def.exprs.size());
      for (size_t i = 0; i < def.exprs.size(); ++i) {
        vals[static_cast<Eigen::Index>(i)] = def.exprs[i].eval(z);
      }
      z[def.ordinal] = smoother(vals);
    }
  }
}

double min_sxi_for_fixed_traj(const DcProgram& p, const Trajectory& traj,
                              double feas_tol) {
  if (traj.horizon() != p.horizon || traj.state_dim() != p.state_dim ||
      traj.input_dim() != p.input_dim) {
    throw std::invalid_argument("trajectory shape does not match the program");
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(p.var_count());
  p.set_trajectory(z, traj);
  for (const auto& row : p.eq_rows) {
    if (std::abs(row.expr.eval(z)) > feas_tol) {
      throw std::invalid_argument(std::string("fixed trajectory violates a ") +
                                  to_string(row.origin) + " equality");
    }
  }
  for (const auto& row : p.ineq_rows) {
    if (row.origin != RowOrigin::StateBox && row.origin != RowOrigin::InputBox) {
      continue;  // rows over auxiliaries are resolved below
    }
    if (row.expr.eval(z) > feas_tol) {
      throw std::invalid_argument(std::string("fixed trajectory violates a ") +
                                  to_string(row.origin) + " inequality");
    }
  }
  // Every max row lower-bounds its auxiliary and every concave constraint
  // lower-bounds its bound variable, so with the trajectory fixed the
  // residual program is monotone: its minimum is the least fixed point,
  // resolved by one bottom-up sweep with the exact min.
  propagate_aux(p, z, Smoother::exact());
  return z[p.sxi_ordinal];
}

AuditReport structural_audit(const DcProgram& p, const TreeStats& stats) {
  AuditReport report;
  auto role_of = [&](int ordinal) { return p.vars[ordinal].role; };

  for (const auto& row : p.eq_rows) {
    report.rows_by_origin[row.origin] += 1;
    for (const auto& [ord, c] : row.expr.coeffs()) {
      (void)c;
      auto role = role_of(ord);
      if (role != VarId::Role::State && role != VarId::Role::Input) {
        report.violations.push_back("equality row (" +
                                    std::string(to_string(row.origin)) +
                                    ") touches auxiliary " + p.vars[ord].name());
      }
    }
  }
  for (const auto& row : p.ineq_rows) {
    report.rows_by_origin[row.origin] += 1;
  }

  report.eq_row_count = static_cast<int>(p.eq_rows.size());
  report.ineq_row_count = static_cast<int>(p.ineq_rows.size());
  report.concave_count = static_cast<int>(p.concave.size());

  if (report.concave_count != stats.n_disj) {
    report.violations.push_back(
        "concave constraint count " + std::to_string(report.concave_count) +
        " != disjunctive node count " + std::to_string(stats.n_disj));
  }

  for (const auto& c : p.concave) {
    if (c.args.size() < 2) {
      report.violations.push_back("concave constraint on node " +
                                  std::to_string(c.node_id) +
                                  " has fewer than two arguments");
    }
    auto role = role_of(c.bound_ordinal);
    if (role != VarId::Role::SMin && role != VarId::Role::SxTop) {
      report.violations.push_back("concave bound is not an SMin/SxTop variable");
    }
  }

  // auxiliary hygiene: every SMax/SMin is wired both as a bound and as an
  // argument somewhere
  std::vector<int> bound_uses(p.var_count(), 0), arg_uses(p.var_count(), 0);
  for (const auto& row : p.ineq_rows) {
    if (row.origin != RowOrigin::MaxRow) continue;
    for (const auto& [ord, c] : row.expr.coeffs()) {
      auto role = role_of(ord);
      if (role == VarId::Role::State || role == VarId::Role::Input) continue;
      if (c < 0) bound_uses[ord] += 1;
      else arg_uses[ord] += 1;
    }
  }
  for (const auto& c : p.concave) {
    bound_uses[c.bound_ordinal] += 1;
    for (const auto& arg : c.args) {
      for (const auto& [ord, coeff] : arg.coeffs()) {
        (void)coeff;
        arg_uses[ord] += 1;
      }
    }
  }
  for (const auto& v : p.vars) {
    if (v.role == VarId::Role::SMax || v.role == VarId::Role::SMin) {
      if (bound_uses[v.ordinal] == 0) {
        report.violations.push_back("auxiliary " + v.name() + " is never bounded");
      }
      if (arg_uses[v.ordinal] == 0) {
        report.violations.push_back("auxiliary " + v.name() + " is never used");
      }
    }
  }

  report.passed = report.violations.empty();
  return report;
}

std::string AuditReport::to_string() const {
  std::ostringstream out;
  out << (passed ? "audit passed" : "audit FAILED") << "; rows:";
  for (const auto& [origin, count] : rows_by_origin) {
    out << " " << stlccp::to_string(origin) << "=" << count;
  }
  out << " concave=" << concave_count;
  for (const auto& v : violations) out << "\n  - " << v;
  return out.str();
}

namespace {

nlohmann::json expr_to_json(const AffExpr& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [ord, c] : e.coeffs()) {
    terms.push_back({{"var", ord}, {"coeff", c}});
  }
  return {{"terms", std::move(terms)}, {"constant", e.constant()}};
}

}  // namespace

nlohmann::json dc_program_to_json(const DcProgram& p) {
  nlohmann::json j;
  j["horizon"] = p.horizon;
  j["state_dim"] = p.state_dim;
  j["input_dim"] = p.input_dim;
  j["top_kind"] = p.top_kind == TopKind::MaxTop ? "max" : "min";
  auto vars = nlohmann::json::array();
  for (const auto& v : p.vars) vars.push_back(v.name());
  j["vars"] = std::move(vars);
  j["cost_linear"] = expr_to_json(p.cost_linear);
  auto dump_rows = [](const std::vector<Row>& rows) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      auto jr = expr_to_json(r.expr);
      jr["origin"] = to_string(r.origin);
      arr.push_back(std::move(jr));
    }
    return arr;
  };
  j["eq_rows"] = dump_rows(p.eq_rows);
  j["ineq_rows"] = dump_rows(p.ineq_rows);
  auto concaves = nlohmann::json::array();
  for (const auto& c : p.concave) {
    nlohmann::json jc;
    auto args = nlohmann::json::array();
    for (const auto& a : c.args) args.push_back(expr_to_json(a));
    jc["args"] = std::move(args);
    jc["bound"] = c.bound_ordinal;
    jc["weight"] = c.weight;
    jc["node_id"] = c.node_id;
    concaves.push_back(std::move(jc));
  }
  j["concave"] = std::move(concaves);
  return j;
}

}  // namespace stlccp

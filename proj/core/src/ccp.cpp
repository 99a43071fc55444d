#include "stlccp/ccp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace stlccp {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterExceeded: return "max-iter-exceeded";
    case SolveStatus::SubproblemFailed: return "subproblem-failed";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Box-Muller over a mersenne twister: std::normal_distribution is
// implementation-defined, this sequence is not.
class GaussianDraw {
 public:
  explicit GaussianDraw(unsigned seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    double u1 = (static_cast<double>(gen_()) + 1.0) / 4294967296.0;  // (0,1]
    double u2 = static_cast<double>(gen_()) / 4294967296.0;          // [0,1)
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = two_pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Initial-state equality rows read x_{0,i} - value = 0; recover the pinned
// values so the random initialization starts from the right anchor.
void apply_pinned_x0(const DcProgram& p, Trajectory& traj) {
  for (const auto& row : p.eq_rows) {
    if (row.origin != RowOrigin::InitialState) continue;
    if (row.expr.coeffs().size() != 1) continue;
    const auto& [ord, coef] = *row.expr.coeffs().begin();
    int t = ord / p.state_dim;
    int i = ord % p.state_dim;
    if (t == 0) traj.states(0, i) = -row.expr.constant() / coef;
  }
}

Trajectory random_trajectory(const DcProgram& p, const CcpConfig& cfg) {
  Trajectory traj;
  traj.states = Eigen::MatrixXd::Zero(p.horizon + 1, p.state_dim);
  traj.inputs = Eigen::MatrixXd::Zero(p.horizon, p.input_dim);
  apply_pinned_x0(p, traj);
  GaussianDraw draw(cfg.seed);
  for (int t = 1; t <= p.horizon; ++t) {
    for (int i = 0; i < p.state_dim; ++i) {
      traj.states(t, i) = cfg.init_sigma * draw.next();
    }
  }
  for (int t = 0; t < p.horizon; ++t) {
    for (int j = 0; j < p.input_dim; ++j) {
      traj.inputs(t, j) = cfg.init_sigma * draw.next();
    }
  }
  return traj;
}

double quad_cost_at(const DcProgram& p,
                    const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (!p.cost_quadratic) return 0.0;
  const auto& quad = *p.cost_quadratic;
  double acc = 0.0;
  const int n = p.state_dim;
  const int m = p.input_dim;
  for (int t = 0; t <= p.horizon; ++t) {
    auto x = z.segment(p.state_ordinal(t, 0), n);
    acc += x.dot(quad.Q * x);
  }
  for (int t = 0; t < p.horizon; ++t) {
    auto u = z.segment(p.input_ordinal(t, 0), m);
    acc += u.dot(quad.R * u);
  }
  return quad.weight * acc;
}

double program_cost(const DcProgram& p,
                    const Eigen::Ref<const Eigen::VectorXd>& z) {
  return p.cost_linear.eval(z) + quad_cost_at(p, z);
}

int smallest_weight(const DcProgram& p) {
  int w = std::numeric_limits<int>::max();
  for (const auto& c : p.concave) w = std::min(w, c.weight);
  return p.concave.empty() ? 1 : w;
}

void append_expr_rows(const std::vector<Row>& rows, int row_offset,
                      std::vector<Eigen::Triplet<double>>& trips,
                      Eigen::VectorXd& rhs) {
  for (size_t i = 0; i < rows.size(); ++i) {
    int r = row_offset + static_cast<int>(i);
    for (const auto& [ord, coef] : rows[i].expr.coeffs()) {
      trips.emplace_back(r, ord, coef);
    }
    rhs[r] = -rows[i].expr.constant();
  }
}

}  // namespace

AffExpr linearize_concave(const ConcaveConstraint& c,
                          const Eigen::Ref<const Eigen::VectorXd>& z,
                          Smoother smoother) {
  if (smoother.kind == Smoother::Kind::ExactMin) {
    throw std::invalid_argument(
        "linearize_concave needs a smooth min (lse or mellowmin)");
  }
  const int r = static_cast<int>(c.args.size());
  Eigen::VectorXd vals(r);
  for (int i = 0; i < r; ++i) vals[i] = c.args[i].eval(z);
  double value = smoother(vals);
  // lse_min and mellowmin differ by a constant, so both use softmin weights
  Eigen::VectorXd w = mellowmin_grad(vals, smoother.k);
  AffExpr lin(value);
  for (int i = 0; i < r; ++i) {
    AffExpr term = c.args[i];
    term *= w[i];
    term.add_constant(-w[i] * vals[i]);
    lin += term;
  }
  return lin;
}

double penalty_weight(const ConcaveConstraint& c, PenaltyMode mode, int iter,
                      int min_weight, double decay_rate) {
  switch (mode) {
    case PenaltyMode::Twp:
      return static_cast<double>(c.weight);
    case PenaltyMode::Normal:
      return static_cast<double>(min_weight);
    case PenaltyMode::Decay:
      return (c.weight - min_weight) * std::exp(-decay_rate * (iter - 1)) +
             min_weight;
  }
  return static_cast<double>(c.weight);
}

double penalty_weight(const ConcaveConstraint& c, PenaltyMode mode, int iter,
                      const TreeStats& stats, double decay_rate) {
  return penalty_weight(c, mode, iter, stats.min_disj_leaf_count, decay_rate);
}

QpProblem assemble_subproblem(const DcProgram& p, const CcpState& state,
                              const CcpConfig& cfg) {
  const int nz = p.var_count();
  const int nc = static_cast<int>(p.concave.size());
  const int total = nz + nc;
  const int min_weight = smallest_weight(p);

  QpProblem qp;
  qp.q = Eigen::VectorXd::Zero(total);
  for (const auto& [ord, coef] : p.cost_linear.coeffs()) qp.q[ord] += coef;

  std::vector<Eigen::Triplet<double>> p_trips;
  if (p.cost_quadratic) {
    const auto& quad = *p.cost_quadratic;
    const int n = p.state_dim;
    const int m = p.input_dim;
    for (int t = 0; t <= p.horizon; ++t) {
      int base = p.state_ordinal(t, 0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v = 2.0 * quad.weight * quad.Q(i, j);
          if (v != 0.0) p_trips.emplace_back(base + i, base + j, v);
        }
      }
    }
    for (int t = 0; t < p.horizon; ++t) {
      int base = p.input_ordinal(t, 0);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double v = 2.0 * quad.weight * quad.R(i, j);
          if (v != 0.0) p_trips.emplace_back(base + i, base + j, v);
        }
      }
    }
  }
  qp.P.resize(total, total);
  qp.P.setFromTriplets(p_trips.begin(), p_trips.end());

  const int me = static_cast<int>(p.eq_rows.size());
  std::vector<Eigen::Triplet<double>> a_trips;
  qp.b = Eigen::VectorXd::Zero(me);
  append_expr_rows(p.eq_rows, 0, a_trips, qp.b);
  qp.A.resize(me, total);
  qp.A.setFromTriplets(a_trips.begin(), a_trips.end());

  // inequality layout: affine rows, then one linearized row per concave
  // constraint, then the s_j >= 0 rows; fixed across iterations so warm
  // starts carry over
  const int mi = static_cast<int>(p.ineq_rows.size()) + 2 * nc;
  std::vector<Eigen::Triplet<double>> g_trips;
  qp.h = Eigen::VectorXd::Zero(mi);
  append_expr_rows(p.ineq_rows, 0, g_trips, qp.h);
  int r = static_cast<int>(p.ineq_rows.size());
  for (int j = 0; j < nc; ++j) {
    const auto& c = p.concave[j];
    AffExpr row = linearize_concave(c, state.z.head(nz), cfg.smoother);
    row -= c.bound;
    row.add_term(nz + j, -1.0);
    for (const auto& [ord, coef] : row.coeffs()) {
      g_trips.emplace_back(r, ord, coef);
    }
    qp.h[r] = -row.constant();
    ++r;
    qp.q[nz + j] = state.tau * penalty_weight(c, cfg.mode, state.iter + 1,
                                              min_weight, cfg.decay_rate);
  }
  for (int j = 0; j < nc; ++j) {
    g_trips.emplace_back(r, nz + j, -1.0);
    qp.h[r] = 0.0;
    ++r;
  }
  qp.G.resize(mi, total);
  qp.G.setFromTriplets(g_trips.begin(), g_trips.end());
  return qp;
}

SolveResult run_ccp(const DcProgram& p, const CcpConfig& cfg,
                    const std::optional<Trajectory>& init) {
  const auto start = Clock::now();
  const int nz = p.var_count();
  const int nc = static_cast<int>(p.concave.size());
  if (nz <= 0 || p.sxi_ordinal < 0) {
    throw std::invalid_argument("run_ccp needs a decomposed program");
  }

  Trajectory traj;
  if (init) {
    if (init->horizon() != p.horizon || init->state_dim() != p.state_dim ||
        init->input_dim() != p.input_dim) {
      throw std::invalid_argument(
          "initial trajectory shape does not match the program");
    }
    traj = *init;
  } else {
    traj = random_trajectory(p, cfg);
  }

  CcpState state;
  state.z = Eigen::VectorXd::Zero(nz + nc);
  p.set_trajectory(state.z, traj);
  propagate_aux(p, state.z, cfg.smoother);
  for (int j = 0; j < nc; ++j) {
    const auto& c = p.concave[j];
    Eigen::VectorXd vals(c.args.size());
    for (size_t i = 0; i < c.args.size(); ++i) {
      vals[static_cast<Eigen::Index>(i)] = c.args[i].eval(state.z);
    }
    state.z[nz + j] =
        std::max(0.0, cfg.smoother(vals) - c.bound.eval(state.z));
  }

  SolveResult result;
  result.status = SolveStatus::MaxIterExceeded;
  std::optional<QpWarmStart> warm;
  double prev_cost = std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg.max_iter; ++it) {
    state.iter = it;
    state.tau = std::min(cfg.tau0 * std::pow(cfg.mu, it), cfg.tau_max);

    const auto iter_start = Clock::now();
    QpProblem qp = assemble_subproblem(p, state, cfg);
    // Penalty terms grow with tau until the cost sits orders of magnitude
    // above the constraint rows, where the solver's absolute tolerances stop
    // being reachable.  Dividing the whole objective by its largest
    // coefficient is the same program at constraint scale; multipliers scale
    // by the same factor.
    const double cost_scale = std::max(1.0, qp.q.lpNorm<Eigen::Infinity>());
    qp.P /= cost_scale;
    qp.q /= cost_scale;
    // Proximal tie-break.  The linearized rows leave flat optimal faces
    // (near-one-hot gradients, penalties parked at zero), where a first-order
    // solver wanders between vertices.  A touch of curvature toward the
    // incumbent picks one point of the face; the bias vanishes as the outer
    // loop settles.
    const double prox = 1e-4;
    {
      Eigen::SparseMatrix<double> reg(qp.var_count(), qp.var_count());
      reg.setIdentity();
      qp.P += 2.0 * prox * reg;
      qp.q -= 2.0 * prox * state.z;
    }
    if (!warm) {
      warm = QpWarmStart{state.z,
                         Eigen::VectorXd::Zero(qp.b.size() + qp.h.size())};
    }
    QpWarmStart scaled_warm{warm->z, warm->y / cost_scale};
    QpSolution sol = solve_qp(qp, cfg.qp, scaled_warm);
    sol.y *= cost_scale;

    IterationRecord rec;
    rec.iter = it + 1;
    rec.tau = state.tau;
    rec.qp_status = sol.status;
    rec.qp_iters = sol.iterations;
    rec.wall_ms = elapsed_ms(iter_start);

    if (sol.status == QpStatus::Infeasible ||
        sol.status == QpStatus::Unbounded) {
      // the convex rows themselves are inconsistent; penalties cannot help
      rec.cost = program_cost(p, state.z.head(nz));
      rec.max_penalty = result.max_penalty;
      result.history.push_back(rec);
      result.status = SolveStatus::SubproblemFailed;
      result.iterations = it + 1;
      break;
    }

    state.z = sol.z;
    warm = QpWarmStart{sol.z, sol.y};
    result.y = sol.y;

    double cost = program_cost(p, state.z.head(nz));
    double max_pen = 0.0;
    for (int j = 0; j < nc; ++j) {
      max_pen = std::max(max_pen, state.z[nz + j]);
    }
    rec.cost = cost;
    rec.max_penalty = max_pen;
    result.history.push_back(rec);
    result.iterations = it + 1;
    result.max_penalty = max_pen;

    if (nc == 0) {
      // already convex: a single clean solve settles it
      if (sol.status == QpStatus::Optimal) {
        result.status = SolveStatus::Converged;
        break;
      }
      if (std::abs(cost - prev_cost) <= cfg.cost_eps) {
        result.status = SolveStatus::Converged;
        break;
      }
    } else if (max_pen <= cfg.s_terminal &&
               std::abs(cost - prev_cost) <= cfg.cost_eps) {
      result.status = SolveStatus::Converged;
      break;
    }
    prev_cost = cost;
  }

  result.trajectory = p.extract_trajectory(state.z.head(nz));
  result.objective = program_cost(p, state.z.head(nz));
  result.sxi = state.z[p.sxi_ordinal];
  result.z = state.z;
  result.wall_ms = elapsed_ms(start);
  result.sound_certified = result.status == SolveStatus::Converged &&
                           cfg.smoother.kind == Smoother::Kind::Mellowmin &&
                           result.sxi < -static_cast<double>(nc) * cfg.s_terminal;
  return result;
}

WarmStartResult warm_start_pipeline(const DcProgram& p, const CcpConfig& cfg) {
  WarmStartResult out;
  CcpConfig stage1_cfg = cfg;
  stage1_cfg.smoother = Smoother::lse(cfg.k_lse);
  out.stage1 = run_ccp(p, stage1_cfg);
  if (out.stage1.status == SolveStatus::SubproblemFailed) {
    return out;
  }
  CcpConfig stage2_cfg = cfg;
  stage2_cfg.smoother = Smoother::mellow(cfg.k_mellow);
  out.stage2 = run_ccp(p, stage2_cfg, out.stage1.trajectory);
  out.stage2.stage = 2;
  for (auto& rec : out.stage2.history) rec.stage = 2;
  return out;
}

}  // namespace stlccp

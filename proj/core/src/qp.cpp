#include "stlccp/qp.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <vector>

namespace stlccp {

const char* to_string(QpStatus status) {
  switch (status) {
    case QpStatus::Optimal: return "optimal";
    case QpStatus::Infeasible: return "infeasible";
    case QpStatus::Unbounded: return "unbounded";
    case QpStatus::MaxIter: return "max-iter";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

Vec col_inf_norms(const SpMat& m, int cols) {
  Vec norms = Vec::Zero(cols);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      norms[it.col()] = std::max(norms[it.col()], std::abs(it.value()));
    }
  }
  return norms;
}

Vec row_inf_norms(const SpMat& m, int rows) {
  Vec norms = Vec::Zero(rows);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      norms[it.row()] = std::max(norms[it.row()], std::abs(it.value()));
    }
  }
  return norms;
}

// Modified Ruiz equilibration producing diagonal scalings D (variables),
// E (rows of the stacked constraint matrix) and a cost factor c, all
// deterministic.  The solver then works on
//   P' = c D P D,  q' = c D q,  M' = E M D,  bounds scaled by E.
struct Scaling {
  Vec d, e;
  double c = 1.0;
};

Scaling ruiz_equilibrate(SpMat& p, Vec& q, SpMat& m, Vec& l, Vec& u,
                         int iterations) {
  const int n = static_cast<int>(q.size());
  const int rows = static_cast<int>(m.rows());
  Scaling s;
  s.d = Vec::Ones(n);
  s.e = Vec::Ones(rows);
  auto safe_factor = [](double norm) {
    if (norm < 1e-12) return 1.0;
    return 1.0 / std::sqrt(norm);
  };
  for (int it = 0; it < iterations; ++it) {
    Vec cp = col_inf_norms(p, n);
    Vec cm = col_inf_norms(m, n);
    Vec delta(n);
    for (int j = 0; j < n; ++j) {
      delta[j] = safe_factor(std::max(cp[j], cm[j]));
    }
    Vec eps(rows);
    Vec rm = row_inf_norms(m, rows);
    for (int i = 0; i < rows; ++i) eps[i] = safe_factor(rm[i]);

    p = delta.asDiagonal() * p * delta.asDiagonal();
    q = delta.asDiagonal() * q;
    m = eps.asDiagonal() * m * delta.asDiagonal();
    for (int i = 0; i < rows; ++i) {
      if (std::isfinite(l[i])) l[i] *= eps[i];
      if (std::isfinite(u[i])) u[i] *= eps[i];
    }
    s.d = s.d.cwiseProduct(delta);
    s.e = s.e.cwiseProduct(eps);

    // bring the cost to unit scale as well
    Vec pcols = col_inf_norms(p, n);
    double mean_p = pcols.size() > 0 ? pcols.mean() : 0.0;
    double gamma = std::max(mean_p, q.lpNorm<Eigen::Infinity>());
    if (gamma > 1e-12) {
      gamma = 1.0 / gamma;
      p *= gamma;
      q *= gamma;
      s.c *= gamma;
    }
  }
  return s;
}

SpMat build_kkt(const SpMat& p, const SpMat& m, double sigma, const Vec& rho) {
  const int n = static_cast<int>(p.rows());
  const int rows = static_cast<int>(m.rows());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(p.nonZeros() + 2 * m.nonZeros() + n + rows);
  for (int k = 0; k < p.outerSize(); ++k) {
    for (SpMat::InnerIterator it(p, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                         it.value());
    }
  }
  for (int j = 0; j < n; ++j) trips.emplace_back(j, j, sigma);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      trips.emplace_back(n + static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
      trips.emplace_back(static_cast<int>(it.col()),
                         n + static_cast<int>(it.row()), it.value());
    }
  }
  for (int i = 0; i < rows; ++i) trips.emplace_back(n + i, n + i, -1.0 / rho[i]);
  SpMat kkt(n + rows, n + rows);
  kkt.setFromTriplets(trips.begin(), trips.end());
  return kkt;
}

struct Residuals {
  double prim = kInf;
  double dual = kInf;
};

}  // namespace

QpSolution solve_qp(const QpProblem& problem, const QpSettings& settings,
                    const std::optional<QpWarmStart>& warm) {
  const int n = problem.var_count();
  const int me = static_cast<int>(problem.A.rows());
  const int mi = static_cast<int>(problem.G.rows());
  const int rows = me + mi;

  if (problem.P.rows() != n || problem.P.cols() != n) {
    throw std::invalid_argument("P shape does not match variable count");
  }
  if ((me > 0 && problem.A.cols() != n) || (mi > 0 && problem.G.cols() != n)) {
    throw std::invalid_argument("constraint matrix width does not match q");
  }
  if (problem.b.size() != me || problem.h.size() != mi) {
    throw std::invalid_argument("constraint vector length mismatch");
  }

  // stack equalities above inequalities: l <= Mz <= u
  SpMat m(rows, n);
  {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(problem.A.nonZeros() + problem.G.nonZeros());
    for (int k = 0; k < problem.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(problem.A, k); it; ++it) {
        trips.emplace_back(static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    for (int k = 0; k < problem.G.outerSize(); ++k) {
      for (SpMat::InnerIterator it(problem.G, k); it; ++it) {
        trips.emplace_back(me + static_cast<int>(it.row()),
                           static_cast<int>(it.col()), it.value());
      }
    }
    m.setFromTriplets(trips.begin(), trips.end());
  }
  Vec l(rows), u(rows);
  l.head(me) = problem.b;
  u.head(me) = problem.b;
  l.tail(mi).setConstant(-kInf);
  u.tail(mi) = problem.h;

  SpMat p = problem.P;
  Vec q = problem.q;
  Scaling scal;
  if (settings.scale) {
    scal = ruiz_equilibrate(p, q, m, l, u, 10);
  } else {
    scal.d = Vec::Ones(n);
    scal.e = Vec::Ones(rows);
  }
  SpMat mt = SpMat(m.transpose());

  // per-row step sizes: equalities get a stiffer rho
  double rho_bar = settings.rho;
  auto make_rho = [&](double base) {
    Vec r(rows);
    r.head(me).setConstant(base * 1e3);
    r.tail(mi).setConstant(base);
    return r;
  };
  Vec rho = make_rho(rho_bar);

  Eigen::SimplicialLDLT<SpMat> kkt;
  kkt.compute(build_kkt(p, m, settings.sigma, rho));
  if (kkt.info() != Eigen::Success) {
    // quasi-definite systems should always factor; report rather than crash
    QpSolution sol;
    sol.status = QpStatus::MaxIter;
    sol.z = Vec::Zero(n);
    sol.y = Vec::Zero(rows);
    return sol;
  }

  Vec z = Vec::Zero(n), zeta = Vec::Zero(rows), y = Vec::Zero(rows);
  if (warm) {
    if (warm->z.size() == n) z = scal.d.cwiseInverse().cwiseProduct(warm->z);
    if (warm->y.size() == rows) {
      y = scal.c * warm->y.cwiseQuotient(scal.e);
    }
    zeta = (m * z).cwiseMax(l).cwiseMin(u);
  } else {
    zeta = Vec::Zero(rows).cwiseMax(l).cwiseMin(u);
  }

  QpSolution sol;
  sol.z = Vec::Zero(n);
  sol.y = Vec::Zero(rows);

  // unscaled copies for residual checks and the polish step
  const SpMat& p0 = problem.P;
  const Vec& q0 = problem.q;

  auto unscale_z = [&](const Vec& zbar) {
    return Vec(scal.d.cwiseProduct(zbar));
  };
  auto unscale_y = [&](const Vec& ybar) {
    return Vec(scal.e.cwiseProduct(ybar) / scal.c);
  };

  auto residuals_unscaled = [&](const Vec& zu, const Vec& yu) {
    Residuals r;
    Vec az(rows);
    az.head(me) = problem.A * zu;
    az.tail(mi) = problem.G * zu;
    double prim = 0.0;
    for (int i = 0; i < me; ++i) {
      prim = std::max(prim, std::abs(az[i] - problem.b[i]));
    }
    for (int i = 0; i < mi; ++i) {
      prim = std::max(prim, az[me + i] - problem.h[i]);
    }
    r.prim = std::max(prim, 0.0);
    Vec grad = p0 * zu + q0;
    if (me > 0) grad += problem.A.transpose() * yu.head(me);
    if (mi > 0) grad += problem.G.transpose() * yu.tail(mi);
    r.dual = grad.lpNorm<Eigen::Infinity>();
    return r;
  };

  // Active-set polish.  Guesses the active inequalities from a first-order
  // iterate (positive multiplier or vanishing slack), solves the
  // equality-constrained KKT system, then corrects the guess for a few
  // rounds: rows the candidate violates join the set, rows whose multiplier
  // comes out negative leave it.  Accepts the best candidate only if it does
  // not regress the incumbent's worst residual.  Returns true when `out` was
  // replaced by a polished solution.
  auto try_polish = [&](QpSolution& out) {
    const Residuals r0 = residuals_unscaled(out.z, out.y);
    // Rows within the iterate's own primal error of being tight are
    // candidates too; at a degenerate corner the multipliers split
    // arbitrarily and can vanish on rows that do support the optimum.
    const double near = std::max(1e-9, 2.0 * r0.prim);
    std::vector<char> member(mi, 0);
    {
      Vec gz = mi > 0 ? Vec(problem.G * out.z) : Vec();
      for (int i = 0; i < mi; ++i) {
        double slack = problem.h[i] - gz[i];
        if (out.y[me + i] > 1e-9 ||
            slack < near * (1.0 + std::abs(problem.h[i]))) {
          member[i] = 1;
        }
      }
    }
    double best_max = std::max(r0.prim, r0.dual);
    bool accepted = false;
    const double delta = 1e-7;

    for (int round = 0; round < 6; ++round) {
      std::vector<int> active;
      active.reserve(mi);
      for (int i = 0; i < mi; ++i) {
        if (member[i]) active.push_back(i);
      }
      const int na = static_cast<int>(active.size());
      const int dim = n + me + na;
      std::vector<Eigen::Triplet<double>> trips;
      for (int k = 0; k < p0.outerSize(); ++k) {
        for (SpMat::InnerIterator it(p0, k); it; ++it) {
          trips.emplace_back(static_cast<int>(it.row()),
                             static_cast<int>(it.col()), it.value());
        }
      }
      for (int j = 0; j < n; ++j) trips.emplace_back(j, j, delta);
      for (int k = 0; k < problem.A.outerSize(); ++k) {
        for (SpMat::InnerIterator it(problem.A, k); it; ++it) {
          trips.emplace_back(n + static_cast<int>(it.row()),
                             static_cast<int>(it.col()), it.value());
          trips.emplace_back(static_cast<int>(it.col()),
                             n + static_cast<int>(it.row()), it.value());
        }
      }
      // collect active G rows (G is column-major, walk all of it once)
      for (int k = 0; k < problem.G.outerSize(); ++k) {
        for (SpMat::InnerIterator it(problem.G, k); it; ++it) {
          auto pos = std::lower_bound(active.begin(), active.end(),
                                      static_cast<int>(it.row()));
          if (pos != active.end() && *pos == static_cast<int>(it.row())) {
            int a = static_cast<int>(pos - active.begin());
            trips.emplace_back(n + me + a, static_cast<int>(it.col()),
                               it.value());
            trips.emplace_back(static_cast<int>(it.col()), n + me + a,
                               it.value());
          }
        }
      }
      for (int i = 0; i < me + na; ++i) {
        trips.emplace_back(n + i, n + i, -delta);
      }
      SpMat kpol(dim, dim);
      kpol.setFromTriplets(trips.begin(), trips.end());
      Eigen::SimplicialLDLT<SpMat> fact(kpol);
      if (fact.info() != Eigen::Success) break;

      Vec rhs(dim);
      rhs.head(n) = -q0;
      rhs.segment(n, me) = problem.b;
      for (int a = 0; a < na; ++a) rhs[n + me + a] = problem.h[active[a]];

      // regularized solve + refinement against the unregularized system
      Vec sol_vec = fact.solve(rhs);
      for (int refine = 0; refine < 3; ++refine) {
        Vec kx(dim);
        kx.head(n) = p0 * sol_vec.head(n);
        if (me > 0) {
          kx.head(n) += problem.A.transpose() * sol_vec.segment(n, me);
          kx.segment(n, me) = problem.A * sol_vec.head(n);
        }
        for (int a = 0; a < na; ++a) kx[n + me + a] = 0.0;
        if (na > 0) {
          for (int k = 0; k < problem.G.outerSize(); ++k) {
            for (SpMat::InnerIterator it(problem.G, k); it; ++it) {
              auto pos = std::lower_bound(active.begin(), active.end(),
                                          static_cast<int>(it.row()));
              if (pos != active.end() && *pos == static_cast<int>(it.row())) {
                int a = static_cast<int>(pos - active.begin());
                kx[n + me + a] += it.value() * sol_vec[it.col()];
                kx[it.col()] += it.value() * sol_vec[n + me + a];
              }
            }
          }
        }
        sol_vec += fact.solve(rhs - kx);
      }

      QpSolution cand = out;
      cand.z = sol_vec.head(n);
      cand.y.setZero();
      cand.y.head(me) = sol_vec.segment(n, me);
      for (int a = 0; a < na; ++a) {
        cand.y[me + active[a]] = sol_vec[n + me + a];
      }

      // a wildly scaled candidate means the working set left the problem
      // unbounded and the regularization absorbed it; its add/drop signals
      // are meaningless
      if (!cand.z.allFinite() || !cand.y.allFinite() ||
          cand.y.lpNorm<Eigen::Infinity>() >
              1e8 * (1.0 + q0.lpNorm<Eigen::Infinity>())) {
        break;
      }

      bool changed = false;
      for (int a = 0; a < na; ++a) {
        if (cand.y[me + active[a]] < -1e-9) {
          member[active[a]] = 0;
          changed = true;
        }
      }
      if (mi > 0) {
        Vec gzc = problem.G * cand.z;
        for (int i = 0; i < mi; ++i) {
          if (!member[i] &&
              gzc[i] - problem.h[i] > 1e-9 * (1.0 + std::abs(problem.h[i]))) {
            member[i] = 1;
            changed = true;
          }
        }
      }

      // report the candidate with its stray negative multipliers cleared
      cand.y.tail(mi) = cand.y.tail(mi).cwiseMax(0.0);
      Residuals r = residuals_unscaled(cand.z, cand.y);
      double worst = std::max(r.prim, r.dual);
      if (std::getenv("STLCCP_QP_TRACE")) {
        std::fprintf(
            stderr,
            "polish round %d: na=%d cand prim %.3e dual %.3e (was %.3e %.3e)\n",
            round, na, r.prim, r.dual, r0.prim, r0.dual);
      }
      if (worst <= best_max) {
        cand.primal_residual = r.prim;
        cand.dual_residual = r.dual;
        cand.polished = true;
        best_max = worst;
        out = cand;
        accepted = true;
      }
      if (!changed) break;
    }
    return accepted;
  };

  const int check_every = std::max(1, settings.check_every);
  int iter = 0;
  int last_polish_attempt = -(check_every * 8);
  Vec z_prev = z, y_prev = y;
  while (iter < settings.max_iter) {
    ++iter;
    // (1) linear system: implicit minimization over (z, slack)
    Vec rhs(n + rows);
    rhs.head(n) = settings.sigma * z - q;
    rhs.tail(rows) = zeta - y.cwiseQuotient(rho);
    Vec kkt_sol = kkt.solve(rhs);
    Vec z_tilde = kkt_sol.head(n);
    Vec nu = kkt_sol.tail(rows);
    Vec zeta_tilde = zeta + (nu - y).cwiseQuotient(rho);

    // (2) relaxation + projection
    z_prev = z;
    y_prev = y;
    z = settings.alpha * z_tilde + (1.0 - settings.alpha) * z;
    Vec zeta_hat = settings.alpha * zeta_tilde + (1.0 - settings.alpha) * zeta;
    Vec zeta_next = (zeta_hat + y.cwiseQuotient(rho)).cwiseMax(l).cwiseMin(u);

    // (3) dual ascent
    y = y + rho.cwiseProduct(zeta_hat - zeta_next);
    zeta = zeta_next;

    if (iter % check_every != 0 && iter != settings.max_iter) continue;

    Vec zu = unscale_z(z);
    Vec yu = unscale_y(y);
    Residuals r = residuals_unscaled(zu, yu);
    if (std::getenv("STLCCP_QP_TRACE") && iter % (check_every * 8) == 0) {
      std::fprintf(stderr, "qp iter %6d  prim %.3e  dual %.3e  rho %.3e\n",
                   iter, r.prim, r.dual, rho_bar);
    }
    if (r.prim <= settings.eps_primal && r.dual <= settings.eps_dual) {
      sol.status = QpStatus::Optimal;
      sol.z = zu;
      sol.y = yu;
      sol.primal_residual = r.prim;
      sol.dual_residual = r.dual;
      sol.iterations = iter;
      break;
    }

    // A settled-enough iterate lets the active-set polish finish the job
    // without grinding the first-order loop all the way to tolerance.
    if (settings.polish && r.prim <= 1e3 * settings.eps_primal &&
        r.dual <= 1e3 * settings.eps_dual &&
        iter - last_polish_attempt >= check_every * 8) {
      last_polish_attempt = iter;
      QpSolution early;
      early.z = zu;
      early.y = yu;
      if (try_polish(early) && early.primal_residual <= settings.eps_primal &&
          early.dual_residual <= settings.eps_dual) {
        sol = early;
        sol.status = QpStatus::Optimal;
        sol.iterations = iter;
        break;
      }
    }

    // divergence certificates (on unscaled deltas)
    Vec dy = unscale_y(y) - unscale_y(y_prev);
    double dy_norm = dy.lpNorm<Eigen::Infinity>();
    if (dy_norm > 1e-14) {
      double eps = settings.eps_infeasible * dy_norm;
      Vec mtdy = Vec::Zero(n);
      if (me > 0) mtdy += problem.A.transpose() * dy.head(me);
      if (mi > 0) mtdy += problem.G.transpose() * dy.tail(mi);
      bool support_ok = true;
      double support = 0.0;
      for (int i = 0; i < me; ++i) {
        support += problem.b[i] * dy[i];  // both bounds finite at b
      }
      for (int i = 0; i < mi; ++i) {
        double v = dy[me + i];
        if (v < -eps) { support_ok = false; break; }  // lower bound is -inf
        support += problem.h[i] * std::max(v, 0.0);
      }
      if (support_ok && mtdy.lpNorm<Eigen::Infinity>() <= eps &&
          support <= -eps) {
        sol.status = QpStatus::Infeasible;
        sol.z = unscale_z(z);
        sol.y = unscale_y(y);
        sol.iterations = iter;
        return sol;
      }
    }
    Vec dz = unscale_z(z) - unscale_z(z_prev);
    double dz_norm = dz.lpNorm<Eigen::Infinity>();
    if (dz_norm > 1e-14) {
      double eps = settings.eps_infeasible * dz_norm;
      bool cert = (p0 * dz).lpNorm<Eigen::Infinity>() <= eps &&
                  q0.dot(dz) <= -eps;
      if (cert && me > 0) {
        Vec adz = problem.A * dz;
        cert = adz.lpNorm<Eigen::Infinity>() <= eps;
      }
      if (cert && mi > 0) {
        Vec gdz = problem.G * dz;
        cert = gdz.maxCoeff() <= eps;  // lower side unbounded
      }
      if (cert) {
        sol.status = QpStatus::Unbounded;
        sol.z = unscale_z(z);
        sol.y = unscale_y(y);
        sol.iterations = iter;
        return sol;
      }
    }

    // deterministic step-size adaptation on the scaled residual ratio
    if (settings.adaptive_rho && iter % (check_every * 4) == 0) {
      Vec mz = m * z;
      double prim_scale = std::max({mz.lpNorm<Eigen::Infinity>(),
                                    zeta.lpNorm<Eigen::Infinity>(), 1e-8});
      double rp_s = (mz - zeta).lpNorm<Eigen::Infinity>() / prim_scale;
      double rd_s = (p * z + q + mt * y).lpNorm<Eigen::Infinity>() /
                    std::max({(p * z).lpNorm<Eigen::Infinity>(),
                              q.lpNorm<Eigen::Infinity>(),
                              (mt * y).lpNorm<Eigen::Infinity>(), 1e-8});
      double ratio =
          std::sqrt(std::max(rp_s, 1e-12) / std::max(rd_s, 1e-12));
      ratio = std::clamp(ratio, 0.02, 50.0);
      if (ratio > 5.0 || ratio < 0.2) {
        rho_bar = std::clamp(rho_bar * ratio, 1e-6, 1e6);
        rho = make_rho(rho_bar);
        kkt.compute(build_kkt(p, m, settings.sigma, rho));
        if (kkt.info() != Eigen::Success) break;
      }
    }
  }

  if (sol.status != QpStatus::Optimal) {
    sol.z = unscale_z(z);
    sol.y = unscale_y(y);
    Residuals r = residuals_unscaled(sol.z, sol.y);
    sol.primal_residual = r.prim;
    sol.dual_residual = r.dual;
    sol.iterations = iter;
    sol.status = QpStatus::MaxIter;
  }

  if (settings.polish && !sol.polished) {
    try_polish(sol);
    if (sol.status == QpStatus::MaxIter &&
        sol.primal_residual <= settings.eps_primal &&
        sol.dual_residual <= settings.eps_dual) {
      sol.status = QpStatus::Optimal;
    }
  }

  sol.objective = 0.5 * sol.z.dot(problem.P * sol.z) + problem.q.dot(sol.z);
  if (std::getenv("STLCCP_QP_TRACE")) {
    std::fprintf(stderr,
                 "qp done   %-8s iters %6d  prim %.3e  dual %.3e  polish %d\n",
                 to_string(sol.status), sol.iterations, sol.primal_residual,
                 sol.dual_residual, sol.polished ? 1 : 0);
  }
  return sol;
}

}  // namespace stlccp

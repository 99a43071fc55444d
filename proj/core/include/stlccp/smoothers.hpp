#pragma once

#include <Eigen/Core>

namespace stlccp {

// Choice of min approximation used by the smoothed evaluators and the CCP
// linearization.  Max functions are never smoothed; they are decomposed
// into rows instead.
struct Smoother {
  enum class Kind { ExactMin, LseMin, Mellowmin };
  Kind kind = Kind::ExactMin;
  double k = 0.0;  // sharpness; unused for ExactMin

  static Smoother exact() { return {Kind::ExactMin, 0.0}; }
  static Smoother lse(double k) { return {Kind::LseMin, k}; }
  static Smoother mellow(double k) { return {Kind::Mellowmin, k}; }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a) const;
};

// Log-sum-exp pair.  lse_max over-approximates max; lse_min = -lse_max(-a)
// under-approximates min:  min(a) - log(r)/k <= lse_min(a) <= min(a).
// Arguments are shifted by the extremum before exponentiating so large
// |k*a_i| cannot overflow.
double lse_max(const Eigen::Ref<const Eigen::VectorXd>& a, double k);
double lse_min(const Eigen::Ref<const Eigen::VectorXd>& a, double k);

// Mellowmin: the r-normalized soft minimum
//     mellowmin_k(a) = -(1/k) * log( (1/r) * sum_i exp(-k a_i) ),  r = len(a).
// Over-approximates min with a gap bounded by the arity:
//     0 <= mellowmin_k(a) - min(a) <= log(r)/k,
// is concave and strictly increasing in every coordinate, tends to the mean
// as k -> 0 and to min as k -> inf.
double mellowmin(const Eigen::Ref<const Eigen::VectorXd>& a, double k);

// Gradient of mellowmin: component i is exp(-k a_i) / sum_j exp(-k a_j),
// i.e. the softmin weights.  Entries are strictly positive and sum to 1.
// lse_min differs from mellowmin by a constant, so this is its gradient too.
Eigen::VectorXd mellowmin_grad(const Eigen::Ref<const Eigen::VectorXd>& a,
                               double k);

// Analytic Hessian of mellowmin: with w = mellowmin_grad(a, k),
//     H = -k * (diag(w) - w w').
// Negative semidefinite with quadratic forms bounded below by -k ||v||^2.
Eigen::MatrixXd mellowmin_hessian(const Eigen::Ref<const Eigen::VectorXd>& a,
                                  double k);

// Samples random unit directions v and checks
//     -k||v||^2 - tol <= v' H v <= tol
// against the analytic Hessian.  Deterministic in `seed`.
struct HessianBoundReport {
  bool within_bounds = false;
  double worst_quad_form = 0.0;   // most negative v'Hv seen
  double worst_upper_excess = 0.0;  // max of v'Hv over samples (should be <= 0)
  int samples = 0;
};
HessianBoundReport mellowmin_hessian_bound_check(
    const Eigen::Ref<const Eigen::VectorXd>& a, double k, int samples = 64,
    unsigned seed = 0, double tol = 1e-8);

}  // namespace stlccp

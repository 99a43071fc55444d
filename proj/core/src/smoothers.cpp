#include "stlccp/smoothers.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace stlccp {

namespace {

void check_args(const Eigen::Ref<const Eigen::VectorXd>& a, double k) {
  if (a.size() == 0) throw std::invalid_argument("empty argument vector");
  if (!(k > 0.0)) throw std::invalid_argument("sharpness k must be positive");
}

// log(sum_i exp(-k a_i)) with the min shifted out so the largest exponent
// is exactly zero.
double shifted_log_sum(const Eigen::Ref<const Eigen::VectorXd>& a, double k,
                       double shift) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    sum += std::exp(-k * (a[i] - shift));
  }
  return std::log(sum);
}

}  // namespace

double lse_min(const Eigen::Ref<const Eigen::VectorXd>& a, double k) {
  check_args(a, k);
  double m = a.minCoeff();
  return m - shifted_log_sum(a, k, m) / k;
}

double lse_max(const Eigen::Ref<const Eigen::VectorXd>& a, double k) {
  check_args(a, k);
  return -lse_min(-a, k);
}

double mellowmin(const Eigen::Ref<const Eigen::VectorXd>& a, double k) {
  // Normalizing by the arity r turns the under-approximation into an
  // over-approximation: mellowmin = lse_min + log(r)/k.
  check_args(a, k);
  return lse_min(a, k) + std::log(static_cast<double>(a.size())) / k;
}

Eigen::VectorXd mellowmin_grad(const Eigen::Ref<const Eigen::VectorXd>& a,
                               double k) {
  check_args(a, k);
  double m = a.minCoeff();
  Eigen::VectorXd w(a.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    w[i] = std::exp(-k * (a[i] - m));
    sum += w[i];
  }
  w /= sum;
  return w;
}

Eigen::MatrixXd mellowmin_hessian(const Eigen::Ref<const Eigen::VectorXd>& a,
                                  double k) {
  Eigen::VectorXd w = mellowmin_grad(a, k);
  return -k * (Eigen::MatrixXd(w.asDiagonal()) - w * w.transpose());
}

double Smoother::operator()(const Eigen::Ref<const Eigen::VectorXd>& a) const {
  switch (kind) {
    case Kind::ExactMin:
      return a.minCoeff();
    case Kind::LseMin:
      return lse_min(a, k);
    case Kind::Mellowmin:
      return mellowmin(a, k);
  }
  throw std::logic_error("unreachable smoother kind");
}

HessianBoundReport mellowmin_hessian_bound_check(
    const Eigen::Ref<const Eigen::VectorXd>& a, double k, int samples,
    unsigned seed, double tol) {
  Eigen::MatrixXd h = mellowmin_hessian(a, k);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  HessianBoundReport report;
  report.samples = samples;
  report.within_bounds = true;
  report.worst_quad_form = 0.0;
  report.worst_upper_excess = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd v(a.size());
    do {
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = unit(rng);
    } while (v.norm() < 1e-6);
    v.normalize();
    double form = v.dot(h * v);
    report.worst_quad_form = std::min(report.worst_quad_form, form);
    report.worst_upper_excess = std::max(report.worst_upper_excess, form);
    // unit v, so the lower bound is exactly -k
    if (form > tol || form < -k - tol) report.within_bounds = false;
  }
  return report;
}

}  // namespace stlccp

#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "stlccp/smoothers.hpp"

using namespace stlccp;

namespace {

Eigen::VectorXd make_vec(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("soft minimum values match hand-checked constants") {
  Eigen::VectorXd a = make_vec({0.0, 1.0});
  CHECK(mellowmin(a, 1.0) == doctest::Approx(0.3798854930417224).epsilon(1e-13));
  CHECK(lse_min(a, 1.0) ==
        doctest::Approx(-0.31326168751822286).epsilon(1e-13));

  Eigen::VectorXd g = mellowmin_grad(a, 1.0);
  CHECK(g[0] == doctest::Approx(0.7310585786300049).epsilon(1e-13));
  CHECK(g[1] == doctest::Approx(0.2689414213699951).epsilon(1e-13));

  // the two smoothers differ by exactly log(r)/k
  CHECK(mellowmin(a, 1.0) - lse_min(a, 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("mellowmin brackets the exact minimum from above by log(r)/k") {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> len(2, 16);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  for (double k : {1.0, 10.0, 1000.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::VectorXd a(len(gen));
      for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = entry(gen);
      const double gap = mellowmin(a, k) - a.minCoeff();
      CHECK(gap >= -1e-9);
      CHECK(gap <= std::log(static_cast<double>(a.size())) / k + 1e-9);
    }
  }
}

TEST_CASE("lse_min brackets the exact minimum from below") {
  std::mt19937 gen(12);
  std::uniform_int_distribution<int> len(2, 16);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd a(len(gen));
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = entry(gen);
    const double k = 5.0;
    const double v = lse_min(a, k);
    CHECK(v <= a.minCoeff() + 1e-12);
    CHECK(v >= a.minCoeff() - std::log(static_cast<double>(a.size())) / k - 1e-9);
    // max mirror
    CHECK(lse_max(a, k) >= a.maxCoeff() - 1e-12);
  }
}

TEST_CASE("gradient matches central differences") {
  std::mt19937 gen(13);
  std::uniform_int_distribution<int> len(2, 10);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  std::uniform_real_distribution<double> sharp(0.5, 20.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::VectorXd a(len(gen));
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = entry(gen);
    const double k = sharp(gen);
    Eigen::VectorXd g = mellowmin_grad(a, k);
    CHECK(g.minCoeff() > 0.0);
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      Eigen::VectorXd ap = a, am = a;
      ap[i] += h;
      am[i] -= h;
      const double fd = (mellowmin(ap, k) - mellowmin(am, k)) / (2.0 * h);
      CHECK(std::abs(g[i] - fd) / g.lpNorm<Eigen::Infinity>() <= 1e-6);
    }
  }
}

TEST_CASE("analytic curvature stays within the arity-free band") {
  std::mt19937 gen(14);
  std::uniform_int_distribution<int> len(2, 16);
  std::uniform_real_distribution<double> entry(-10.0, 10.0);
  std::uniform_real_distribution<double> sharp(0.5, 50.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(len(gen));
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = entry(gen);
    const double k = sharp(gen);
    Eigen::VectorXd v(a.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = dir(gen);
    v /= v.norm();

    Eigen::MatrixXd H = mellowmin_hessian(a, k);
    const double quad = v.dot(H * v);
    CHECK(quad <= 1e-8);
    CHECK(quad >= -k * v.squaredNorm() - 1e-8);
  }

  Eigen::VectorXd a = make_vec({0.3, -1.2, 4.0});
  HessianBoundReport rep = mellowmin_hessian_bound_check(a, 7.0, 64, 3);
  CHECK(rep.within_bounds);
  CHECK(rep.samples == 64);
  CHECK(rep.worst_upper_excess <= 1e-8);
}

TEST_CASE("sharpness limits: mean at k to zero, min at k to infinity") {
  Eigen::VectorXd a = make_vec({-2.0, 0.5, 3.0});
  CHECK(mellowmin(a, 1e-9) == doctest::Approx(a.mean()).epsilon(1e-6));
  CHECK(mellowmin(a, 1e6) == doctest::Approx(a.minCoeff()).epsilon(1e-6));
}

TEST_CASE("extreme magnitudes do not overflow") {
  Eigen::VectorXd a = make_vec({1e8, -1e8});
  for (double k : {1.0, 1000.0}) {
    const double m = mellowmin(a, k);
    CHECK(std::isfinite(m));
    // the arity gap log(2)/k still applies, the huge spread must not
    CHECK(m >= -1e8);
    CHECK(m <= -1e8 + std::log(2.0) / k + 1e-9);
    CHECK(std::isfinite(lse_max(a, k)));
    Eigen::VectorXd g = mellowmin_grad(a, k);
    CHECK(std::isfinite(g.sum()));
  }
}

TEST_CASE("smoother dispatch applies the selected approximation") {
  Eigen::VectorXd a = make_vec({0.0, 1.0});
  CHECK(Smoother::exact()(a) == 0.0);
  CHECK(Smoother::lse(1.0)(a) == lse_min(a, 1.0));
  CHECK(Smoother::mellow(1.0)(a) == mellowmin(a, 1.0));
}

#pragma once

#include <Eigen/Core>
#include <vector>

namespace stlccp {

// Discrete-time linear dynamics x_{t+1} = A x_t + B u_t.
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  Eigen::VectorXd step(const Eigen::Ref<const Eigen::VectorXd>& x,
                       const Eigen::Ref<const Eigen::VectorXd>& u) const {
    return A * x + B * u;
  }
};

// Planar double integrator with unit time step: state (px, py, vx, vy),
// input (ax, ay); positions integrate the previous velocity.
LinearSystem double_integrator();

// Per-coordinate interval bounds on states and inputs, plus optional extra
// halfspace rows a'x_t <= b applied at every step.  Infinities disable a
// side.
struct InequalityRow {
  Eigen::VectorXd a;
  double b = 0.0;
};

struct Bounds {
  Eigen::VectorXd state_lo, state_hi;  // size n or empty (= unbounded)
  Eigen::VectorXd input_lo, input_hi;  // size m or empty
  std::vector<InequalityRow> state_rows;  // general polyhedral extras
  std::vector<InequalityRow> input_rows;

  static Bounds unbounded() { return {}; }
};

}  // namespace stlccp

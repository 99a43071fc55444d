#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>

namespace stlccp {

// Discrete-time trajectory over horizon T: states x_0..x_T stacked as rows
// of `states` ((T+1) x n) and inputs u_0..u_{T-1} as rows of `inputs`
// (T x m).  `inputs` may be empty when only states matter.
struct Trajectory {
  Eigen::MatrixXd states;
  Eigen::MatrixXd inputs;

  int horizon() const { return static_cast<int>(states.rows()) - 1; }
  int state_dim() const { return static_cast<int>(states.cols()); }
  int input_dim() const { return static_cast<int>(inputs.cols()); }

  Eigen::VectorXd state(int t) const { return states.row(t).transpose(); }
};

// CSV round-trip.  Header is "t,px,py,vx,vy,ux,uy" for the planar
// double-integrator layout (n=4, m=2) and generic "t,x0..,u0.." otherwise.
// Input cells of the final row (t = T) are left empty since u_T does not
// exist.  Values are printed with enough digits to round-trip exactly.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv_file(const std::string& path, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv_file(const std::string& path);

}  // namespace stlccp

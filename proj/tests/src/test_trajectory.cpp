#include <doctest.h>

#include <Eigen/Core>
#include <cstdio>
#include <sstream>

#include "stlccp/trajectory.hpp"

using namespace stlccp;

TEST_CASE("csv round-trips the planar double-integrator layout exactly") {
  Trajectory traj;
  traj.states.resize(3, 4);
  traj.states << 0.0, 0.0, 0.25, -1.5,
                 0.25, -1.5, 1.0 / 3.0, 2.0,
                 0.25 + 1.0 / 3.0, 0.5, 0.125, 1e-17;
  traj.inputs.resize(2, 2);
  traj.inputs << 0.1, -0.2,
                 1.0 / 7.0, 3.5;

  std::stringstream buf;
  write_trajectory_csv(buf, traj);
  std::string text = buf.str();
  CHECK(text.rfind("t,px,py,vx,vy,ux,uy", 0) == 0);

  Trajectory back = read_trajectory_csv(buf);
  CHECK(back.horizon() == 2);
  CHECK(back.state_dim() == 4);
  CHECK(back.input_dim() == 2);
  CHECK(back.states == traj.states);
  CHECK(back.inputs == traj.inputs);
}

TEST_CASE("csv uses generic column names off the 4+2 layout") {
  Trajectory traj;
  traj.states.resize(2, 3);
  traj.states << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  traj.inputs.resize(1, 1);
  traj.inputs << -0.5;

  std::stringstream buf;
  write_trajectory_csv(buf, traj);
  CHECK(buf.str().rfind("t,x0,x1,x2,u0", 0) == 0);
  Trajectory back = read_trajectory_csv(buf);
  CHECK(back.states == traj.states);
  CHECK(back.inputs == traj.inputs);
}

TEST_CASE("state-only trajectories keep an empty input block") {
  Trajectory traj;
  traj.states.resize(2, 2);
  traj.states << 0.0, 1.0, 2.0, 3.0;

  std::stringstream buf;
  write_trajectory_csv(buf, traj);
  Trajectory back = read_trajectory_csv(buf);
  CHECK(back.states == traj.states);
  CHECK(back.inputs.size() == 0);
}

TEST_CASE("malformed csv is rejected with a parse error") {
  auto parse = [](const std::string& text) {
    std::stringstream buf(text);
    return read_trajectory_csv(buf);
  };
  CHECK_THROWS(parse(""));
  CHECK_THROWS(parse("px,py\n0,0\n"));            // no leading t column
  CHECK_THROWS(parse("t\n0\n"));                  // no state columns
  CHECK_THROWS(parse("t,x0\n"));                  // header only, no rows
  CHECK_THROWS(parse("t,x0\n0,abc\n"));           // non-numeric cell
  CHECK_THROWS(parse("t,x0,u0\n0,1\n"));          // short row
  CHECK_THROWS(parse("t,x0,banana\n0,1,2\n"));    // unknown column
}

TEST_CASE("missing files raise instead of returning empties") {
  CHECK_THROWS(read_trajectory_csv_file("/nonexistent/dir/traj.csv"));
}

TEST_CASE("file round-trip") {
  Trajectory traj;
  traj.states.resize(2, 4);
  traj.states.setRandom();
  traj.inputs.resize(1, 2);
  traj.inputs.setRandom();
  const std::string path = "test_traj_roundtrip.csv";
  write_trajectory_csv_file(path, traj);
  Trajectory back = read_trajectory_csv_file(path);
  CHECK(back.states == traj.states);
  CHECK(back.inputs == traj.inputs);
  std::remove(path.c_str());
}

#include <doctest.h>

#include <Eigen/Core>
#include <nlohmann/json.hpp>
#include <random>

#include "random_corpus.hpp"
#include "stlccp/dc_program.hpp"
#include "stlccp/robustness.hpp"
#include "stlccp/simplify.hpp"

using namespace stlccp;

namespace {

Predicate halfspace(int dim, int axis, double coeff, double b) {
  Predicate p;
  p.a = Eigen::VectorXd::Zero(dim);
  p.a[axis] = coeff;
  p.b = b;
  return p;
}

// inside the unit square around the origin, as four halfspace predicates
Formula unit_square(int dim = 4) {
  return Formula::conj({Formula::pred(halfspace(dim, 0, 1.0, 1.0)),
                        Formula::pred(halfspace(dim, 0, -1.0, 1.0)),
                        Formula::pred(halfspace(dim, 1, 1.0, 1.0)),
                        Formula::pred(halfspace(dim, 1, -1.0, 1.0))});
}

Trajectory rollout(const LinearSystem& sys, const Eigen::VectorXd& x0,
                   const Eigen::MatrixXd& inputs) {
  Trajectory traj;
  const int T = static_cast<int>(inputs.rows());
  traj.states.resize(T + 1, sys.state_dim());
  traj.inputs = inputs;
  traj.states.row(0) = x0.transpose();
  for (int t = 0; t < T; ++t) {
    traj.states.row(t + 1) =
        sys.step(traj.states.row(t).transpose(), inputs.row(t).transpose())
            .transpose();
  }
  return traj;
}

LinearSystem small_system(int n, int m) {
  LinearSystem sys;
  sys.A = 0.9 * Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) sys.A(i, i + 1) = 0.1;
  sys.B = Eigen::MatrixXd::Zero(n, m);
  for (int j = 0; j < m; ++j) sys.B(j % n, j) = 1.0;
  return sys;
}

}  // namespace

TEST_CASE("reach-the-square fixture decomposes to the expected shape") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(4);

  DcProgram p = decompose(tree, sys, x0, 4);

  // 20 state + 8 input + s_xi + 5 max-node auxiliaries
  CHECK(p.var_count() == 34);
  CHECK(p.horizon == 4);
  CHECK(p.state_dim == 4);
  CHECK(p.input_dim == 2);
  CHECK(p.top_kind == TopKind::MinTop);
  CHECK(p.sxi_ordinal >= 0);
  CHECK(p.cost_linear.coeffs().size() == 1);
  CHECK(p.cost_linear.coeffs().count(p.sxi_ordinal) == 1);

  CHECK(p.eq_rows.size() == 20);  // 4 initial-state + 4*4 dynamics
  REQUIRE(p.concave.size() == 1);
  CHECK(p.concave[0].args.size() == 5);
  CHECK(p.concave[0].weight == 20);
  CHECK(p.concave[0].bound_ordinal == p.sxi_ordinal);

  TreeStats stats = tree_stats(tree);
  AuditReport audit = structural_audit(p, stats);
  CHECK(audit.passed);
  CHECK(audit.violations.empty());
  CHECK(audit.rows_by_origin[RowOrigin::InitialState] == 4);
  CHECK(audit.rows_by_origin[RowOrigin::Dynamics] == 16);
  CHECK(audit.rows_by_origin[RowOrigin::TopBound] == 1);
  CHECK(audit.rows_by_origin[RowOrigin::MaxRow] == 20);
  CHECK(audit.concave_count == stats.n_disj);
}

TEST_CASE("box bounds emit two rows per finite side") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();
  Bounds bounds;
  bounds.state_lo = Eigen::VectorXd::Constant(4, -10.0);
  bounds.state_hi = Eigen::VectorXd::Constant(4, 10.0);
  bounds.input_lo = Eigen::VectorXd::Constant(2, -5.0);
  bounds.input_hi = Eigen::VectorXd::Constant(2, 5.0);

  DcProgram p = decompose(tree, sys, Eigen::VectorXd::Zero(4), 4, bounds);
  AuditReport audit = structural_audit(p, tree_stats(tree));
  CHECK(audit.passed);
  CHECK(audit.rows_by_origin[RowOrigin::StateBox] == 40);  // 5 steps * 4 * 2
  CHECK(audit.rows_by_origin[RowOrigin::InputBox] == 16);  // 4 steps * 2 * 2
}

TEST_CASE("fixed-trajectory bound equals the exact reversed score") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();

  // parked at the square's center the score is -1 (reversed sign)
  Trajectory still = rollout(sys, Eigen::VectorXd::Zero(4),
                             Eigen::MatrixXd::Zero(4, 2));
  DcProgram p = decompose(tree, sys, still.state(0), 4);
  CHECK(min_sxi_for_fixed_traj(p, still) == doctest::Approx(-1.0));
  CHECK(min_sxi_for_fixed_traj(p, still) ==
        doctest::Approx(eval_tree(tree, still)));
}

TEST_CASE("fixed-trajectory bound matches the tree on a random corpus") {
  std::mt19937 rng(555);
  LinearSystem sys = small_system(3, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    Formula f = corpus::random_formula(rng, 3, 3, 10);
    RobustnessTree tree = simplify(build_tree(f));
    const int T = 10;
    Eigen::VectorXd x0(3);
    Eigen::MatrixXd inputs(T, 2);
    for (int i = 0; i < 3; ++i) x0[i] = unit(rng);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < 2; ++j) inputs(t, j) = unit(rng);
    Trajectory traj = rollout(sys, x0, inputs);

    DcProgram p = decompose(tree, sys, x0, T);
    AuditReport audit = structural_audit(p, tree_stats(tree));
    CHECK(audit.passed);
    CHECK(min_sxi_for_fixed_traj(p, traj) ==
          doctest::Approx(eval_tree(tree, traj)).epsilon(1e-9));
  }
}

TEST_CASE("dynamics violations are rejected, not absorbed") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();
  Trajectory bad;
  bad.states = Eigen::MatrixXd::Random(5, 4);
  bad.inputs = Eigen::MatrixXd::Zero(4, 2);
  DcProgram p = decompose(tree, sys, bad.state(0), 4);
  CHECK_THROWS_AS(min_sxi_for_fixed_traj(p, bad), std::invalid_argument);
}

TEST_CASE("trajectory scatter and gather round-trip") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();
  DcProgram p = decompose(tree, sys, Eigen::VectorXd::Zero(4), 4);

  Trajectory traj = rollout(sys, Eigen::VectorXd::Ones(4) * 0.25,
                            Eigen::MatrixXd::Ones(4, 2) * 0.5);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(p.var_count());
  p.set_trajectory(z, traj);
  Trajectory back = p.extract_trajectory(z);
  CHECK(back.states.isApprox(traj.states));
  CHECK(back.inputs.isApprox(traj.inputs));
  CHECK(z[p.state_ordinal(2, 1)] == traj.states(2, 1));
  CHECK(z[p.input_ordinal(3, 0)] == traj.inputs(3, 0));
}

TEST_CASE("auxiliary propagation reproduces the bound, smoothed or exact") {
  std::mt19937 rng(777);
  LinearSystem sys = small_system(3, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    Formula f = corpus::random_formula(rng, 3, 3, 10);
    RobustnessTree tree = simplify(build_tree(f));
    Eigen::VectorXd x0(3);
    Eigen::MatrixXd inputs(10, 2);
    for (int i = 0; i < 3; ++i) x0[i] = unit(rng);
    for (int t = 0; t < 10; ++t)
      for (int j = 0; j < 2; ++j) inputs(t, j) = unit(rng);
    Trajectory traj = rollout(sys, x0, inputs);
    DcProgram p = decompose(tree, sys, x0, 10);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(p.var_count());
    p.set_trajectory(z, traj);
    propagate_aux(p, z, Smoother::exact());
    CHECK(z[p.sxi_ordinal] ==
          doctest::Approx(eval_tree(tree, traj)).epsilon(1e-9));

    // softened minima only push the top value up
    Eigen::VectorXd zs = z;
    propagate_aux(p, zs, Smoother::mellow(5.0));
    CHECK(zs[p.sxi_ordinal] >= z[p.sxi_ordinal] - 1e-12);
  }
}

TEST_CASE("quadratic effort cost is carried through") {
  Formula f = Formula::eventually(0, 4, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  LinearSystem sys = double_integrator();
  QuadCost quad;
  quad.Q = Eigen::MatrixXd::Zero(4, 4);
  quad.R = Eigen::MatrixXd::Identity(2, 2);
  quad.weight = 0.1;
  DcProgram p =
      decompose(tree, sys, Eigen::VectorXd::Zero(4), 4, Bounds::unbounded(),
                quad);
  REQUIRE(p.cost_quadratic.has_value());
  CHECK(p.cost_quadratic->weight == doctest::Approx(0.1));
}

TEST_CASE("program serializes with its structural fields") {
  Formula f = Formula::eventually(0, 2, unit_square());
  RobustnessTree tree = simplify(build_tree(f));
  DcProgram p =
      decompose(tree, double_integrator(), Eigen::VectorXd::Zero(4), 2);
  nlohmann::json j = dc_program_to_json(p);
  CHECK(j["horizon"] == 2);
  CHECK(j["top_kind"] == "min");
  CHECK(j["vars"].size() == p.vars.size());
  CHECK(j["eq_rows"].size() == p.eq_rows.size());
  CHECK(j["concave"].size() == 1);
}

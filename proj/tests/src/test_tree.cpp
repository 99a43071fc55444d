#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <random>

#include "random_corpus.hpp"
#include "stlccp/robustness.hpp"
#include "stlccp/tree.hpp"

using namespace stlccp;

namespace {

Predicate pred_1d(double a, double b) {
  Predicate p;
  p.a = Eigen::VectorXd::Constant(1, a);
  p.b = b;
  return p;
}

}  // namespace

TEST_CASE("boolean nodes keep the anchor time, temporal nodes fan out") {
  Formula pred = Formula::pred(pred_1d(1.0, 0.0));
  Formula f = Formula::conj({Formula::always(1, 3, pred), pred});

  RobustnessTree tree = build_tree(f, 2);
  // reversed semantics: And -> Max
  REQUIRE(tree.kind() == RobustnessTree::Kind::Max);
  REQUIRE(tree.arity() == 2);
  CHECK(tree.steps() == std::vector<int>{2, 2});

  const RobustnessTree& always = tree.children()[0];
  CHECK(always.kind() == RobustnessTree::Kind::Max);
  CHECK(always.steps() == std::vector<int>{3, 4, 5});
  for (int i = 0; i < always.arity(); ++i) {
    CHECK(always.children()[i].is_leaf());
    CHECK(always.children()[i].time() == 3 + i);
  }

  CHECK(tree.children()[1].is_leaf());
  CHECK(tree.children()[1].time() == 2);
}

TEST_CASE("eventually expands to a min node over the window") {
  Formula f = Formula::eventually(0, 2, Formula::pred(pred_1d(1.0, 0.0)));
  RobustnessTree tree = build_tree(f);
  CHECK(tree.kind() == RobustnessTree::Kind::Min);
  CHECK(tree.arity() == 3);
}

TEST_CASE("horizon bound rejects leaves pinned past the trajectory end") {
  Formula f = Formula::always(0, 5, Formula::pred(pred_1d(1.0, 0.0)));
  CHECK_THROWS_AS(build_tree(f, 0, UntilSemantics::Standard, 4), HorizonError);
  CHECK_NOTHROW(build_tree(f, 0, UntilSemantics::Standard, 5));
  CHECK(max_leaf_time(build_tree(f)) == 5);
}

TEST_CASE("tree evaluation matches the recursive reversed score") {
  std::mt19937 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    Formula f = corpus::random_formula(rng, 3, 4, 12);
    Trajectory traj = corpus::random_trajectory(rng, 12, 3);
    for (UntilSemantics u :
         {UntilSemantics::Standard, UntilSemantics::PaperLiteral}) {
      RobustnessTree tree = build_tree(f, 0, u);
      double direct = eval_robustness_rev(f, traj, 0, Smoother::exact(), u);
      CHECK(eval_tree(tree, traj) == doctest::Approx(direct).epsilon(1e-12));

      double soft = eval_robustness_rev(f, traj, 0, Smoother::mellow(3.0), u);
      CHECK(eval_tree(tree, traj, Smoother::mellow(3.0)) ==
            doctest::Approx(soft).epsilon(1e-12));
    }
  }
}

TEST_CASE("until expansion in standard semantics carries the running prefix") {
  // lhs margins reversed = x, rhs reversed = -x - 5 on x = (-10, -1, -3):
  // lhs_rev (-10, -1, -3), rhs_rev (5, -4, -2)
  Formula lhs = Formula::pred(pred_1d(1.0, 0.0));
  Formula rhs = Formula::pred(pred_1d(-1.0, 5.0));
  Formula u = Formula::until(0, 2, lhs, rhs);
  Trajectory traj;
  traj.states.resize(3, 1);
  traj.states << -10.0, -1.0, -3.0;

  RobustnessTree tree = build_tree(u, 0, UntilSemantics::Standard);
  REQUIRE(tree.kind() == RobustnessTree::Kind::Min);
  REQUIRE(tree.arity() == 3);
  // min over t' of max(rhs_rev(t'), max(lhs_rev over [0, t'])) = -1
  CHECK(eval_tree(tree, traj) == doctest::Approx(-1.0));

  // the literal variant puts max on top and samples the lhs pointwise:
  // max over t' of min(lhs_rev(t'), min of rhs_rev over [0, t']) = -4
  RobustnessTree lit = build_tree(u, 0, UntilSemantics::PaperLiteral);
  REQUIRE(lit.kind() == RobustnessTree::Kind::Max);
  CHECK(eval_tree(lit, traj) == doctest::Approx(-4.0));
}

TEST_CASE("stats count disjunctive structure") {
  Formula pred = Formula::pred(pred_1d(1.0, 0.0));
  // Or of two Eventually windows: one min node at top, two below, leaves 2+3
  Formula f = Formula::disj(
      {Formula::eventually(0, 1, pred), Formula::eventually(0, 2, pred)});
  RobustnessTree tree = build_tree(f);
  TreeStats stats = tree_stats(tree);
  CHECK(stats.n_disj == 3);
  CHECK(stats.n_leaves == 5);
  CHECK(stats.n_leaves_under_min == 5);
  CHECK(stats.n_leaves_under_max == 0);
  CHECK(stats.leaf_count_per_node.at(0) == 5);
  CHECK(stats.min_disj_leaf_count == 2);

  CHECK(min_node_depth(tree) == 2);
  CHECK(max_min_arity(tree) == 3);
}

TEST_CASE("stats on a pure conjunction see no disjunctive nodes") {
  Formula pred = Formula::pred(pred_1d(1.0, 0.0));
  Formula f = Formula::always(0, 4, pred);
  TreeStats stats = tree_stats(build_tree(f));
  CHECK(stats.n_disj == 0);
  CHECK(stats.n_leaves == 5);
  CHECK(stats.n_leaves_under_max == 5);
  CHECK(stats.min_disj_leaf_count == 1);
  CHECK(min_node_depth(build_tree(f)) == 0);
}

TEST_CASE("smoothing error obeys the depth and arity bound") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Formula f = corpus::random_formula(rng, 2, 3, 8);
    Trajectory traj = corpus::random_trajectory(rng, 8, 2);
    RobustnessTree tree = build_tree(f);
    double exact = eval_tree(tree, traj);
    for (double k : {1.0, 10.0}) {
      double bound =
          min_node_depth(tree) * std::log(std::max(1, max_min_arity(tree))) / k;
      double soft = eval_tree(tree, traj, Smoother::mellow(k));
      CHECK(soft >= exact - 1e-12);
      CHECK(soft <= exact + bound + 1e-9);
    }
  }
}

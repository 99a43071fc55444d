#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "random_corpus.hpp"
#include "stlccp/simplify.hpp"

using namespace stlccp;

namespace {

Predicate pred_1d(double a, double b) {
  Predicate p;
  p.a = Eigen::VectorXd::Constant(1, a);
  p.b = b;
  return p;
}

int count_nodes(const RobustnessTree& t) {
  if (t.is_leaf()) return 1;
  int n = 1;
  for (const auto& c : t.children()) n += count_nodes(c);
  return n;
}

// leaf multiset as sorted (time, b) pairs, enough to identify our fixtures
std::vector<std::pair<int, double>> leaf_signature(const RobustnessTree& t) {
  std::vector<std::pair<int, double>> sig;
  std::function<void(const RobustnessTree&)> walk =
      [&](const RobustnessTree& node) {
        if (node.is_leaf()) {
          sig.emplace_back(node.time(), node.predicate().b);
          return;
        }
        for (const auto& c : node.children()) walk(c);
      };
  walk(t);
  std::sort(sig.begin(), sig.end());
  return sig;
}

}  // namespace

TEST_CASE("nested same-kind nodes splice into the parent") {
  Formula pred = Formula::pred(pred_1d(1.0, 0.0));
  // Or over two Eventually windows builds min-of-min
  Formula f = Formula::disj(
      {Formula::eventually(0, 1, pred), Formula::eventually(0, 2, pred)});
  RobustnessTree tree = build_tree(f);
  CHECK_FALSE(is_simplified(tree));

  RobustnessTree flat = simplify(tree);
  CHECK(is_simplified(flat));
  REQUIRE(flat.kind() == RobustnessTree::Kind::Min);
  CHECK(flat.arity() == 5);
  CHECK(count_nodes(flat) == 6);
  CHECK(tree_stats(flat).n_disj == 1);
}

TEST_CASE("mixed alternation survives untouched") {
  Formula pred = Formula::pred(pred_1d(1.0, 0.0));
  // Always over Eventually alternates max/min, nothing to splice
  Formula f = Formula::always(0, 2, Formula::eventually(0, 1, pred));
  RobustnessTree tree = build_tree(f);
  CHECK(is_simplified(tree));
  CHECK(simplify(tree) == tree);
}

TEST_CASE("simplification preserves value, leaves, and is idempotent") {
  std::mt19937 rng(424242);
  for (int trial = 0; trial < 200; ++trial) {
    Formula f = corpus::random_formula(rng, 3, 4, 12);
    Trajectory traj = corpus::random_trajectory(rng, 12, 3);
    RobustnessTree tree = build_tree(f);
    RobustnessTree flat = simplify(tree);

    CHECK(is_simplified(flat));
    CHECK(simplify(flat) == flat);
    CHECK(leaf_signature(flat) == leaf_signature(tree));
    CHECK(eval_tree(flat, traj) ==
          doctest::Approx(eval_tree(tree, traj)).epsilon(1e-12));
    CHECK(count_nodes(flat) <= count_nodes(tree));
  }
}

TEST_CASE("multi-level chains flatten in one call") {
  // hand-build min(min(min(leaf, leaf), leaf), leaf)
  auto leaf = [](int t) { return RobustnessTree::leaf(pred_1d(1.0, 0.0), t); };
  RobustnessTree inner =
      RobustnessTree::min_node({leaf(0), leaf(1)}, {0, 1});
  RobustnessTree mid =
      RobustnessTree::min_node({inner, leaf(2)}, {0, 2});
  RobustnessTree top =
      RobustnessTree::min_node({mid, leaf(3)}, {0, 3});

  RobustnessTree flat = simplify(top);
  CHECK(is_simplified(flat));
  REQUIRE(flat.kind() == RobustnessTree::Kind::Min);
  CHECK(flat.arity() == 4);
  // spliced children keep their instantiation times
  CHECK(flat.steps() == std::vector<int>{0, 1, 2, 3});
}

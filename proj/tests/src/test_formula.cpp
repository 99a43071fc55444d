#include <doctest.h>

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "stlccp/formula.hpp"

using namespace stlccp;

namespace {

Predicate axis_pred(int dim, int axis, double coeff, double b) {
  Predicate p;
  p.a = Eigen::VectorXd::Zero(dim);
  p.a[axis] = coeff;
  p.b = b;
  return p;
}

}  // namespace

TEST_CASE("predicate margin is the signed halfspace distance") {
  Predicate p = axis_pred(2, 0, 1.0, 2.0);
  Eigen::VectorXd x(2);
  x << 3.0, 0.0;
  CHECK(p.margin(x) == doctest::Approx(1.0));
  x << 2.0, 7.0;
  CHECK(p.margin(x) == doctest::Approx(0.0));
}

TEST_CASE("connective factories expose kind, interval, and children") {
  Formula a = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  Formula b = Formula::pred(axis_pred(2, 1, 1.0, 0.0));

  Formula g = Formula::always(1, 3, a);
  CHECK(g.kind() == Formula::Kind::Always);
  CHECK(g.t1() == 1);
  CHECK(g.t2() == 3);
  CHECK(g.child() == a);
  CHECK(g.is_temporal());

  Formula f = Formula::eventually(0, 2, b);
  CHECK(f.kind() == Formula::Kind::Eventually);

  Formula u = Formula::until(0, 4, a, b);
  CHECK(u.kind() == Formula::Kind::Until);
  CHECK(u.until_lhs() == a);
  CHECK(u.until_rhs() == b);
  CHECK(u.children().size() == 2);

  Formula c = Formula::conj({a, b});
  CHECK(c.kind() == Formula::Kind::And);
  CHECK(c.children().size() == 2);
  CHECK_FALSE(c.is_temporal());
}

TEST_CASE("unit-arity connectives collapse and same-kind children splice") {
  Formula a = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  Formula b = Formula::pred(axis_pred(2, 1, 1.0, 0.0));
  Formula c = Formula::pred(axis_pred(2, 0, -1.0, 1.0));

  CHECK(Formula::conj({a}) == a);
  CHECK(Formula::disj({b}) == b);

  Formula nested = Formula::conj({Formula::conj({a, b}), c});
  CHECK(nested.children().size() == 3);

  // mixed kinds stay put
  Formula mixed = Formula::conj({Formula::disj({a, b}), c});
  CHECK(mixed.children().size() == 2);
}

TEST_CASE("interval validation rejects empty and negative windows") {
  Formula a = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  CHECK_THROWS_AS(Formula::always(2, 2, a), std::invalid_argument);
  CHECK_THROWS_AS(Formula::always(3, 1, a), std::invalid_argument);
  CHECK_THROWS_AS(Formula::eventually(-1, 2, a), std::invalid_argument);
  CHECK_THROWS_AS(Formula::until(5, 5, a, a), std::invalid_argument);
  CHECK_THROWS_AS(Formula::conj({}), std::invalid_argument);
}

TEST_CASE("lookahead length adds nested temporal windows") {
  Formula a = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  Formula b = Formula::pred(axis_pred(2, 1, 1.0, 0.0));

  CHECK(formula_length(a) == 0);
  CHECK(formula_length(Formula::always(0, 3, a)) == 3);
  CHECK(formula_length(Formula::eventually(1, 4, Formula::always(0, 2, a))) ==
        6);
  CHECK(formula_length(Formula::until(0, 5, a, b)) == 5);
  CHECK(formula_length(Formula::until(1, 3, Formula::always(0, 2, a), b)) ==
        5);
  CHECK(formula_length(Formula::conj({Formula::always(0, 2, a),
                                      Formula::eventually(0, 7, b)})) == 7);
}

TEST_CASE("all predicates of one formula must share a state dimension") {
  Formula two = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  Formula three = Formula::pred(axis_pred(3, 0, 1.0, 0.0));
  CHECK(two.state_dim() == 2);
  CHECK_THROWS_AS(Formula::conj({two, three}), std::invalid_argument);
}

TEST_CASE("structural equality is by value, not identity") {
  Formula a1 = Formula::pred(axis_pred(2, 0, 1.0, 0.5));
  Formula a2 = Formula::pred(axis_pred(2, 0, 1.0, 0.5));
  Formula b = Formula::pred(axis_pred(2, 0, 1.0, 0.25));
  CHECK(a1 == a2);
  CHECK(a1 != b);
  CHECK(Formula::always(0, 3, a1) == Formula::always(0, 3, a2));
  CHECK(Formula::always(0, 3, a1) != Formula::always(0, 4, a2));
}

TEST_CASE("printing produces a readable nested form") {
  Formula a = Formula::pred(axis_pred(2, 0, 1.0, 0.0));
  Formula g = Formula::always(0, 2, a);
  const std::string s = g.to_string();
  CHECK(s.find("[0,2]") != std::string::npos);
}

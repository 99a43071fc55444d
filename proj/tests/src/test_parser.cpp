#include <doctest.h>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "stlccp/parser.hpp"

using namespace stlccp;
using nlohmann::json;

namespace {

Predicate axis_pred(int dim, int axis, double coeff, double b) {
  Predicate p;
  p.a = Eigen::VectorXd::Zero(dim);
  p.a[axis] = coeff;
  p.b = b;
  return p;
}

SymbolTable two_names() {
  SymbolTable table;
  table.symbols.emplace("reach", Formula::pred(axis_pred(2, 0, 1.0, 1.0)));
  table.symbols.emplace("safe_1", Formula::pred(axis_pred(2, 1, 1.0, 2.0)));
  table.negated.emplace("reach", Formula::pred(axis_pred(2, 0, -1.0, -1.0)));
  table.negated.emplace("safe_1", Formula::pred(axis_pred(2, 1, -1.0, -2.0)));
  return table;
}

}  // namespace

TEST_CASE("grammar: disjunction binds loosest, conjunction next") {
  SymbolTable table = two_names();
  Formula f = parse_formula("G[0,5] reach & F[0,3] safe_1 | safe_1", 2, table);
  REQUIRE(f.kind() == Formula::Kind::Or);
  REQUIRE(f.children().size() == 2);
  CHECK(f.children()[0].kind() == Formula::Kind::And);
  CHECK(f.children()[1].kind() == Formula::Kind::Pred);
}

TEST_CASE("grammar: temporal operators and until") {
  SymbolTable table = two_names();
  Formula g = parse_formula("G[1,4] reach", 2, table);
  CHECK(g.kind() == Formula::Kind::Always);
  CHECK(g.t1() == 1);
  CHECK(g.t2() == 4);

  Formula u = parse_formula("reach U[0,6] safe_1", 2, table);
  CHECK(u.kind() == Formula::Kind::Until);
  CHECK(u.t2() == 6);

  Formula nested = parse_formula("F[0,2] G[0,3] reach", 2, table);
  CHECK(nested.kind() == Formula::Kind::Eventually);
  CHECK(nested.child().kind() == Formula::Kind::Always);
}

TEST_CASE("grammar: bang resolves through the negated table") {
  SymbolTable table = two_names();
  Formula f = parse_formula("!reach", 2, table);
  REQUIRE(f.kind() == Formula::Kind::Pred);
  CHECK(f.predicate().a[0] == doctest::Approx(-1.0));
  CHECK(f.predicate().b == doctest::Approx(-1.0));
}

TEST_CASE("grammar: comparisons build linear predicates") {
  Formula le = parse_formula("x0 <= 3", 2);
  REQUIRE(le.kind() == Formula::Kind::Pred);
  CHECK(le.predicate().a[0] == doctest::Approx(1.0));
  CHECK(le.predicate().a[1] == doctest::Approx(0.0));
  CHECK(le.predicate().b == doctest::Approx(3.0));

  // >= flips into the "<= 0 satisfied" convention
  Formula ge = parse_formula("x1 >= 2", 2);
  REQUIRE(ge.kind() == Formula::Kind::Pred);
  Eigen::VectorXd x(2);
  x << 0.0, 5.0;
  CHECK(ge.predicate().margin(x) == doctest::Approx(-3.0));

  Formula lin = parse_formula("2*x0 - 1*x1 <= 4", 2);
  CHECK(lin.predicate().a[0] == doctest::Approx(2.0));
  CHECK(lin.predicate().a[1] == doctest::Approx(-1.0));
  CHECK(lin.predicate().b == doctest::Approx(4.0));
}

TEST_CASE("grammar: parentheses group subformulas") {
  SymbolTable table = two_names();
  Formula f = parse_formula("G[0,2] (reach | safe_1)", 2, table);
  REQUIRE(f.kind() == Formula::Kind::Always);
  CHECK(f.child().kind() == Formula::Kind::Or);
}

TEST_CASE("parse failures carry a byte position") {
  SymbolTable table = two_names();
  CHECK_THROWS_AS(parse_formula("", 2, table), ParseError);
  CHECK_THROWS_AS(parse_formula("unknown_name", 2, table), ParseError);
  CHECK_THROWS_AS(parse_formula("G[4,1] reach", 2, table), ParseError);
  CHECK_THROWS_AS(parse_formula("reach &", 2, table), ParseError);
  CHECK_THROWS_AS(parse_formula("x9 <= 1", 2, table), ParseError);
  try {
    parse_formula("reach & $", 2, table);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.pos() >= 0);
  }
}

TEST_CASE("json mirror round-trips every node kind") {
  SymbolTable table = two_names();
  Formula f = parse_formula(
      "(G[0,5] reach & F[0,3] safe_1) | (reach U[0,4] !safe_1)", 2, table);
  json j = formula_to_json(f);
  Formula back = formula_from_json(j);
  CHECK(back == f);

  json pred{{"kind", "pred"}, {"a", {1.0, 0.0}}, {"b", 0.5}};
  Formula p = formula_from_json(pred);
  CHECK(p.kind() == Formula::Kind::Pred);
  CHECK(p.predicate().b == doctest::Approx(0.5));

  CHECK_THROWS_AS(formula_from_json(json{{"kind", "what"}}), ParseError);
}

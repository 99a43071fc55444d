#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlccp {

// Linear predicate a'x - b over the state vector.  A state satisfies the
// predicate iff a'x - b <= 0; the boundary counts as satisfied.
struct Predicate {
  Eigen::VectorXd a;
  double b = 0.0;
  std::string label;  // optional, used in diagnostics and dumps

  double margin(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return a.dot(x) - b;
  }
};

bool operator==(const Predicate& lhs, const Predicate& rhs);

// Which recursion the until operator uses.
//
// Standard: phi1 holds from the evaluation time until phi2 fires somewhere
// in the window.  PaperLiteral swaps the roles of the two operands and
// anchors the inner window at the left endpoint of the interval; it is kept
// selectable so both readings can be compared on the same inputs.
enum class UntilSemantics { Standard, PaperLiteral };

// Immutable formula in negation normal form.  Negation never appears as a
// node: predicates are flipped at construction time instead.  And/Or are
// n-ary.  Nodes are shared, so copies are cheap.
class Formula {
 public:
  enum class Kind { Pred, And, Or, Always, Eventually, Until };

  static Formula pred(Predicate p);
  // n-ary conjunction/disjunction.  Arity 1 collapses to the child and
  // children of the same kind are spliced in (associativity), so the stored
  // arity matches what the connective chain denotes.
  static Formula conj(std::vector<Formula> children);
  static Formula disj(std::vector<Formula> children);
  static Formula always(int t1, int t2, Formula child);
  static Formula eventually(int t1, int t2, Formula child);
  static Formula until(int t1, int t2, Formula lhs, Formula rhs);

  Kind kind() const;
  bool is_temporal() const {
    return kind() == Kind::Always || kind() == Kind::Eventually ||
           kind() == Kind::Until;
  }

  const Predicate& predicate() const;        // Pred only
  const std::vector<Formula>& children() const;  // And/Or; Until holds {lhs, rhs}
  const Formula& child() const;              // Always/Eventually
  const Formula& until_lhs() const;          // Until
  const Formula& until_rhs() const;          // Until
  int t1() const;                            // temporal kinds
  int t2() const;

  // Dimension of the state vectors the predicates constrain.  All predicates
  // in one formula must agree.
  int state_dim() const;

  std::string to_string() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Formula make_nary(Kind kind, std::vector<Formula> children);
  static Formula make_unary_temporal(Kind kind, int t1, int t2, Formula child,
                                     const char* op);
  std::shared_ptr<const Node> node_;

  friend bool operator==(const Formula& lhs, const Formula& rhs);
};

bool operator==(const Formula& lhs, const Formula& rhs);
inline bool operator!=(const Formula& lhs, const Formula& rhs) {
  return !(lhs == rhs);
}

// Number of steps past the evaluation time the formula can look at:
// 0 for predicates, max over children for And/Or, t2 plus the child's
// length for Always/Eventually, t2 plus the larger operand length for Until.
// Evaluating at time t needs trajectory samples up to t + length.
int formula_length(const Formula& f);

// Raised when a trajectory is too short for the formula evaluated on it.
class HorizonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stlccp

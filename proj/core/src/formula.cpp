#include "stlccp/formula.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace stlccp {

bool operator==(const Predicate& lhs, const Predicate& rhs) {
  return lhs.b == rhs.b && lhs.a.size() == rhs.a.size() && lhs.a == rhs.a;
}

struct Formula::Node {
  Kind kind;
  Predicate pred;                  // Pred
  std::vector<Formula> children;   // And/Or: operands; Until: {lhs, rhs}
  int t1 = 0, t2 = 0;              // temporal kinds
};

namespace {

void check_interval(int t1, int t2, const char* op) {
  if (t1 < 0 || t2 < 0) {
    throw std::invalid_argument(std::string(op) +
                                ": interval endpoints must be nonnegative");
  }
  if (t1 >= t2) {
    throw std::invalid_argument(std::string(op) + ": interval [" +
                                std::to_string(t1) + "," + std::to_string(t2) +
                                "] must satisfy t1 < t2");
  }
}

// Mixed predicate dimensions would only surface as a bad dot product deep
// inside evaluation, so reject them where the operands meet.
void check_same_dim(const Formula& a, const Formula& b) {
  if (a.state_dim() != b.state_dim()) {
    throw std::invalid_argument(
        "operands disagree on state dimension: " +
        std::to_string(a.state_dim()) + " vs " + std::to_string(b.state_dim()));
  }
}

}  // namespace

Formula Formula::make_nary(Kind kind, std::vector<Formula> children) {
  if (children.empty()) {
    throw std::invalid_argument("And/Or needs at least one operand");
  }
  // Associativity normalization: splice same-kind operands so a chained
  // connective is stored as one n-ary node, and drop the wrapper entirely
  // for a single operand.
  std::vector<Formula> flat;
  flat.reserve(children.size());
  for (auto& c : children) {
    if (c.kind() == kind) {
      for (const auto& gc : c.children()) flat.push_back(gc);
    } else {
      flat.push_back(std::move(c));
    }
  }
  if (flat.size() == 1) return flat.front();
  for (size_t i = 1; i < flat.size(); ++i) check_same_dim(flat[0], flat[i]);
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = std::move(flat);
  return Formula(std::move(node));
}

Formula Formula::make_unary_temporal(Kind kind, int t1, int t2, Formula child,
                                     const char* op) {
  check_interval(t1, t2, op);
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->t1 = t1;
  node->t2 = t2;
  node->children.push_back(std::move(child));
  return Formula(std::move(node));
}

Formula Formula::pred(Predicate p) {
  if (p.a.size() == 0) {
    throw std::invalid_argument("predicate needs a nonempty coefficient vector");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Pred;
  node->pred = std::move(p);
  return Formula(std::move(node));
}

Formula Formula::conj(std::vector<Formula> children) {
  return make_nary(Kind::And, std::move(children));
}

Formula Formula::disj(std::vector<Formula> children) {
  return make_nary(Kind::Or, std::move(children));
}

Formula Formula::always(int t1, int t2, Formula child) {
  return make_unary_temporal(Kind::Always, t1, t2, std::move(child), "always");
}

Formula Formula::eventually(int t1, int t2, Formula child) {
  return make_unary_temporal(Kind::Eventually, t1, t2, std::move(child),
                             "eventually");
}

Formula Formula::until(int t1, int t2, Formula lhs, Formula rhs) {
  check_interval(t1, t2, "until");
  check_same_dim(lhs, rhs);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Until;
  node->t1 = t1;
  node->t2 = t2;
  node->children.push_back(std::move(lhs));
  node->children.push_back(std::move(rhs));
  return Formula(std::move(node));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Predicate& Formula::predicate() const {
  if (kind() != Kind::Pred) throw std::logic_error("not a predicate node");
  return node_->pred;
}

const std::vector<Formula>& Formula::children() const {
  return node_->children;
}

const Formula& Formula::child() const {
  if (kind() != Kind::Always && kind() != Kind::Eventually) {
    throw std::logic_error("not a unary temporal node");
  }
  return node_->children.front();
}

const Formula& Formula::until_lhs() const {
  if (kind() != Kind::Until) throw std::logic_error("not an until node");
  return node_->children[0];
}

const Formula& Formula::until_rhs() const {
  if (kind() != Kind::Until) throw std::logic_error("not an until node");
  return node_->children[1];
}

int Formula::t1() const {
  if (!is_temporal()) throw std::logic_error("no interval on this node");
  return node_->t1;
}

int Formula::t2() const {
  if (!is_temporal()) throw std::logic_error("no interval on this node");
  return node_->t2;
}

int Formula::state_dim() const {
  if (kind() == Kind::Pred) return static_cast<int>(node_->pred.a.size());
  return node_->children.front().state_dim();
}

int formula_length(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return 0;
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      int len = 0;
      for (const auto& c : f.children()) len = std::max(len, formula_length(c));
      return len;
    }
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      return f.t2() + formula_length(f.child());
    case Formula::Kind::Until:
      return f.t2() + std::max(formula_length(f.until_lhs()),
                               formula_length(f.until_rhs()));
  }
  throw std::logic_error("unreachable formula kind");
}

namespace {

bool equal(const Formula& lhs, const Formula& rhs) {
  if (lhs.kind() != rhs.kind()) return false;
  switch (lhs.kind()) {
    case Formula::Kind::Pred:
      return lhs.predicate() == rhs.predicate();
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
    case Formula::Kind::Until:
      if (lhs.t1() != rhs.t1() || lhs.t2() != rhs.t2()) return false;
      [[fallthrough]];
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const auto& lc = lhs.children();
      const auto& rc = rhs.children();
      if (lc.size() != rc.size()) return false;
      for (size_t i = 0; i < lc.size(); ++i) {
        if (!(lc[i] == rc[i])) return false;
      }
      return true;
    }
  }
  return false;
}

void print(std::ostream& out, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Pred: {
      const auto& p = f.predicate();
      if (!p.label.empty()) {
        out << p.label;
      } else {
        out << "(";
        bool first = true;
        for (int i = 0; i < p.a.size(); ++i) {
          if (p.a[i] == 0.0) continue;
          if (!first) out << (p.a[i] > 0 ? " + " : " - ");
          else if (p.a[i] < 0) out << "-";
          double mag = std::abs(p.a[i]);
          if (mag != 1.0) out << mag << "*";
          out << "x" << i;
          first = false;
        }
        if (first) out << "0";
        out << " <= " << p.b << ")";
      }
      break;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      const char* sep = f.kind() == Formula::Kind::And ? " & " : " | ";
      out << "(";
      for (size_t i = 0; i < f.children().size(); ++i) {
        if (i) out << sep;
        print(out, f.children()[i]);
      }
      out << ")";
      break;
    }
    case Formula::Kind::Always:
    case Formula::Kind::Eventually:
      out << (f.kind() == Formula::Kind::Always ? "G[" : "F[") << f.t1() << ","
          << f.t2() << "] ";
      print(out, f.child());
      break;
    case Formula::Kind::Until:
      out << "(";
      print(out, f.until_lhs());
      out << " U[" << f.t1() << "," << f.t2() << "] ";
      print(out, f.until_rhs());
      out << ")";
      break;
  }
}

}  // namespace

bool operator==(const Formula& lhs, const Formula& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  return equal(lhs, rhs);
}

std::string Formula::to_string() const {
  std::ostringstream out;
  print(out, *this);
  return out.str();
}

}  // namespace stlccp

#include "stlccp/tree.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <sstream>

namespace stlccp {

struct RobustnessTree::Node {
  Kind kind;
  Predicate pred;  // Leaf
  int time = 0;    // Leaf
  std::vector<RobustnessTree> children;
  std::vector<int> steps;
};

RobustnessTree RobustnessTree::leaf(Predicate p, int time) {
  if (time < 0) throw std::invalid_argument("leaf time must be nonnegative");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Leaf;
  node->pred = std::move(p);
  node->time = time;
  return RobustnessTree(std::move(node));
}

RobustnessTree RobustnessTree::make_internal(Kind kind,
                                             std::vector<RobustnessTree> children,
                                             std::vector<int> steps) {
  if (children.empty()) {
    throw std::invalid_argument("internal tree node needs children");
  }
  if (children.size() != steps.size()) {
    throw std::invalid_argument("need one time step per child (got " +
                                std::to_string(steps.size()) + " steps for " +
                                std::to_string(children.size()) + " children)");
  }
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->children = std::move(children);
  node->steps = std::move(steps);
  return RobustnessTree(std::move(node));
}

RobustnessTree RobustnessTree::max_node(std::vector<RobustnessTree> children,
                                        std::vector<int> steps) {
  return make_internal(Kind::Max, std::move(children), std::move(steps));
}

RobustnessTree RobustnessTree::min_node(std::vector<RobustnessTree> children,
                                        std::vector<int> steps) {
  return make_internal(Kind::Min, std::move(children), std::move(steps));
}

RobustnessTree::Kind RobustnessTree::kind() const { return node_->kind; }

const Predicate& RobustnessTree::predicate() const {
  if (!is_leaf()) throw std::logic_error("not a leaf");
  return node_->pred;
}

int RobustnessTree::time() const {
  if (!is_leaf()) throw std::logic_error("not a leaf");
  return node_->time;
}

const std::vector<RobustnessTree>& RobustnessTree::children() const {
  return node_->children;
}

const std::vector<int>& RobustnessTree::steps() const { return node_->steps; }

namespace {

using Kind = RobustnessTree::Kind;

RobustnessTree build(const Formula& f, int t0, UntilSemantics until) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return RobustnessTree::leaf(f.predicate(), t0);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<RobustnessTree> kids;
      kids.reserve(f.children().size());
      for (const auto& c : f.children()) kids.push_back(build(c, t0, until));
      std::vector<int> steps(f.children().size(), t0);
      return f.kind() == Formula::Kind::And
                 ? RobustnessTree::max_node(std::move(kids), std::move(steps))
                 : RobustnessTree::min_node(std::move(kids), std::move(steps));
    }
    case Formula::Kind::Always:
    case Formula::Kind::Eventually: {
      std::vector<RobustnessTree> kids;
      std::vector<int> steps;
      for (int s = t0 + f.t1(); s <= t0 + f.t2(); ++s) {
        kids.push_back(build(f.child(), s, until));
        steps.push_back(s);
      }
      return f.kind() == Formula::Kind::Always
                 ? RobustnessTree::max_node(std::move(kids), std::move(steps))
                 : RobustnessTree::min_node(std::move(kids), std::move(steps));
    }
    case Formula::Kind::Until: {
      const Formula& lhs = f.until_lhs();
      const Formula& rhs = f.until_rhs();
      std::vector<RobustnessTree> outer;
      std::vector<int> outer_steps;
      for (int tp = t0 + f.t1(); tp <= t0 + f.t2(); ++tp) {
        if (until == UntilSemantics::Standard) {
          // witness: rhs at t', lhs everywhere on the prefix [t0, t']
          std::vector<RobustnessTree> window;
          std::vector<int> wsteps;
          for (int ts = t0; ts <= tp; ++ts) {
            window.push_back(build(lhs, ts, until));
            wsteps.push_back(ts);
          }
          std::vector<RobustnessTree> pair;
          pair.push_back(build(rhs, tp, until));
          pair.push_back(
              RobustnessTree::max_node(std::move(window), std::move(wsteps)));
          outer.push_back(RobustnessTree::max_node(std::move(pair), {tp, t0}));
        } else {
          // PaperLiteral: lhs at t', rhs over [t0+t1, t']
          std::vector<RobustnessTree> window;
          std::vector<int> wsteps;
          for (int ts = t0 + f.t1(); ts <= tp; ++ts) {
            window.push_back(build(rhs, ts, until));
            wsteps.push_back(ts);
          }
          std::vector<RobustnessTree> pair;
          pair.push_back(build(lhs, tp, until));
          pair.push_back(
              RobustnessTree::min_node(std::move(window), std::move(wsteps)));
          outer.push_back(
              RobustnessTree::min_node(std::move(pair), {tp, t0 + f.t1()}));
        }
        outer_steps.push_back(tp);
      }
      return until == UntilSemantics::Standard
                 ? RobustnessTree::min_node(std::move(outer),
                                            std::move(outer_steps))
                 : RobustnessTree::max_node(std::move(outer),
                                            std::move(outer_steps));
    }
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace

RobustnessTree build_tree(const Formula& f, int t0, UntilSemantics until,
                          std::optional<int> horizon) {
  if (t0 < 0) throw std::invalid_argument("anchor time must be nonnegative");
  if (horizon && t0 + formula_length(f) > *horizon) {
    throw HorizonError("horizon " + std::to_string(*horizon) +
                       " too short: formula anchored at t=" + std::to_string(t0) +
                       " needs samples up to t=" +
                       std::to_string(t0 + formula_length(f)));
  }
  return build(f, t0, until);
}

double eval_tree(const RobustnessTree& tree, const Trajectory& traj,
                 Smoother smoother) {
  if (tree.is_leaf()) {
    if (tree.time() > traj.horizon()) {
      throw HorizonError("trajectory horizon " + std::to_string(traj.horizon()) +
                         " too short for leaf at t=" + std::to_string(tree.time()));
    }
    return tree.predicate().margin(traj.states.row(tree.time()).transpose());
  }
  if (tree.kind() == Kind::Max) {
    double v = -std::numeric_limits<double>::infinity();
    for (const auto& c : tree.children()) {
      v = std::max(v, eval_tree(c, traj, smoother));
    }
    return v;
  }
  Eigen::VectorXd vals(tree.arity());
  for (int i = 0; i < tree.arity(); ++i) {
    vals[i] = eval_tree(tree.children()[i], traj, smoother);
  }
  return smoother(vals);
}

namespace {

// Preorder walk computing all the stats in one pass; returns the subtree
// leaf count.  `next_id` is the preorder counter.
int stats_walk(const RobustnessTree& t, TreeStats& out, int& next_id) {
  int id = next_id++;
  if (t.is_leaf()) {
    out.n_leaves += 1;
    out.leaf_count_per_node[id] = 1;
    return 1;
  }
  if (t.kind() == Kind::Min) out.n_disj += 1;
  int leaves = 0;
  for (const auto& c : t.children()) {
    if (c.is_leaf()) {
      if (t.kind() == Kind::Max) out.n_leaves_under_max += 1;
      else out.n_leaves_under_min += 1;
    }
    leaves += stats_walk(c, out, next_id);
  }
  out.leaf_count_per_node[id] = leaves;
  if (t.kind() == Kind::Min) {
    out.min_disj_leaf_count = std::min(out.min_disj_leaf_count, leaves);
  }
  return leaves;
}

}  // namespace

TreeStats tree_stats(const RobustnessTree& tree) {
  TreeStats stats;
  stats.min_disj_leaf_count = std::numeric_limits<int>::max();
  int next_id = 0;
  stats_walk(tree, stats, next_id);
  if (tree.is_leaf()) {
    // A bare predicate acts as a degenerate max top, so its single leaf
    // counts on the conjunctive side.
    stats.n_leaves_under_max = 1;
  }
  if (stats.n_disj == 0) stats.min_disj_leaf_count = 1;
  return stats;
}

int min_node_depth(const RobustnessTree& tree) {
  if (tree.is_leaf()) return 0;
  int deepest = 0;
  for (const auto& c : tree.children()) {
    deepest = std::max(deepest, min_node_depth(c));
  }
  return deepest + (tree.kind() == Kind::Min ? 1 : 0);
}

int max_min_arity(const RobustnessTree& tree) {
  if (tree.is_leaf()) return 0;
  int widest = tree.kind() == Kind::Min ? tree.arity() : 0;
  for (const auto& c : tree.children()) {
    widest = std::max(widest, max_min_arity(c));
  }
  return widest;
}

int max_leaf_time(const RobustnessTree& tree) {
  if (tree.is_leaf()) return tree.time();
  int latest = 0;
  for (const auto& c : tree.children()) {
    latest = std::max(latest, max_leaf_time(c));
  }
  return latest;
}

namespace {

bool tree_equal(const RobustnessTree& lhs, const RobustnessTree& rhs) {
  if (lhs.kind() != rhs.kind()) return false;
  if (lhs.is_leaf()) {
    return lhs.time() == rhs.time() && lhs.predicate() == rhs.predicate();
  }
  if (lhs.steps() != rhs.steps()) return false;
  if (lhs.arity() != rhs.arity()) return false;
  for (int i = 0; i < lhs.arity(); ++i) {
    if (!(lhs.children()[i] == rhs.children()[i])) return false;
  }
  return true;
}

void tree_print(std::ostream& out, const RobustnessTree& t, int indent) {
  for (int i = 0; i < indent; ++i) out << "  ";
  if (t.is_leaf()) {
    const auto& p = t.predicate();
    out << "leaf t=" << t.time() << " "
        << (p.label.empty() ? std::string("<pred>") : p.label) << "\n";
    return;
  }
  out << (t.kind() == Kind::Max ? "max" : "min") << " [";
  for (size_t i = 0; i < t.steps().size(); ++i) {
    if (i) out << ",";
    out << t.steps()[i];
  }
  out << "]\n";
  for (const auto& c : t.children()) tree_print(out, c, indent + 1);
}

}  // namespace

bool operator==(const RobustnessTree& lhs, const RobustnessTree& rhs) {
  if (lhs.node_ == rhs.node_) return true;
  return tree_equal(lhs, rhs);
}

std::string RobustnessTree::to_string() const {
  std::ostringstream out;
  tree_print(out, *this, 0);
  return out.str();
}

}  // namespace stlccp

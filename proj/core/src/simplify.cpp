#include "stlccp/simplify.hpp"

namespace stlccp {

namespace {

using Kind = RobustnessTree::Kind;

// One splice pass.  A same-kind non-leaf child is replaced by its children
// and steps; the spliced-in grandchildren are left untouched this pass (a
// deep same-kind chain therefore needs one pass per level, which the outer
// fixed-point loop provides).  Other children are recursed into.
RobustnessTree simplify_once(const RobustnessTree& tree, bool& changed) {
  if (tree.is_leaf()) return tree;
  std::vector<RobustnessTree> kids;
  std::vector<int> steps;
  kids.reserve(tree.children().size());
  steps.reserve(tree.children().size());
  for (int i = 0; i < tree.arity(); ++i) {
    const RobustnessTree& child = tree.children()[i];
    if (!child.is_leaf() && child.kind() == tree.kind()) {
      // Absorb: child's children keep their own (absolute) time steps.
      for (int j = 0; j < child.arity(); ++j) {
        kids.push_back(child.children()[j]);
        steps.push_back(child.steps()[j]);
      }
      changed = true;
    } else {
      kids.push_back(simplify_once(child, changed));
      steps.push_back(tree.steps()[i]);
    }
  }
  return tree.kind() == Kind::Max
             ? RobustnessTree::max_node(std::move(kids), std::move(steps))
             : RobustnessTree::min_node(std::move(kids), std::move(steps));
}

}  // namespace

RobustnessTree simplify(const RobustnessTree& tree) {
  RobustnessTree current = tree;
  bool changed = true;
  while (changed) {
    changed = false;
    current = simplify_once(current, changed);
  }
  return current;
}

bool is_simplified(const RobustnessTree& tree) {
  if (tree.is_leaf()) return true;
  for (const auto& child : tree.children()) {
    if (!child.is_leaf() && child.kind() == tree.kind()) return false;
    if (!is_simplified(child)) return false;
  }
  return true;
}

}  // namespace stlccp

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stlccp/formula.hpp"
#include "stlccp/smoothers.hpp"
#include "stlccp/trajectory.hpp"

namespace stlccp {

// Robustness tree in reversed semantics: internal nodes apply max or min to
// their children, leaves are predicates pinned to absolute time steps.
// `steps` records, per child, the absolute time the child was instantiated
// at (for a temporal node these are t+t1..t+t2; for a boolean node they all
// equal the node's own time).  The tree evaluates to the same number as
// eval_robustness_rev on the formula it was built from.
//
// Nodes are addressed by their preorder index (root = 0, children visited
// left to right); stats and the decomposition use the same numbering, so it
// stays consistent as long as both run on the same tree value.
class RobustnessTree {
 public:
  enum class Kind { Max, Min, Leaf };

  static RobustnessTree leaf(Predicate p, int time);
  static RobustnessTree max_node(std::vector<RobustnessTree> children,
                                 std::vector<int> steps);
  static RobustnessTree min_node(std::vector<RobustnessTree> children,
                                 std::vector<int> steps);

  Kind kind() const;
  bool is_leaf() const { return kind() == Kind::Leaf; }

  const Predicate& predicate() const;  // Leaf only
  int time() const;                    // Leaf only
  const std::vector<RobustnessTree>& children() const;
  const std::vector<int>& steps() const;
  int arity() const { return static_cast<int>(children().size()); }

  std::string to_string() const;

 private:
  struct Node;
  explicit RobustnessTree(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  static RobustnessTree make_internal(Kind kind,
                                      std::vector<RobustnessTree> children,
                                      std::vector<int> steps);
  std::shared_ptr<const Node> node_;

  friend bool operator==(const RobustnessTree& lhs, const RobustnessTree& rhs);
};

bool operator==(const RobustnessTree& lhs, const RobustnessTree& rhs);
inline bool operator!=(const RobustnessTree& lhs, const RobustnessTree& rhs) {
  return !(lhs == rhs);
}

// Expands the formula into its robustness tree anchored at time t0.
// And/Or become max/min nodes over their children at t0; Always/Eventually
// become max/min nodes over the window; Until expands per the selected
// semantics (standard: min over t' of max(rhs at t', max of lhs over
// [t0, t'])).  When `horizon` is given, leaves past it raise HorizonError.
RobustnessTree build_tree(const Formula& f, int t0 = 0,
                          UntilSemantics until = UntilSemantics::Standard,
                          std::optional<int> horizon = std::nullopt);

// Evaluates the tree against a trajectory; min nodes go through `smoother`.
double eval_tree(const RobustnessTree& tree, const Trajectory& traj,
                 Smoother smoother = Smoother::exact());

struct TreeStats {
  int n_disj = 0;    // min-type nodes (these become concave constraints)
  int n_leaves = 0;
  int n_leaves_under_max = 0;  // a root leaf counts here (degenerate max top)
  int n_leaves_under_min = 0;
  // preorder node index -> number of leaves in that node's subtree
  std::map<int, int> leaf_count_per_node;
  // smallest subtree leaf count over min-type nodes (1 when there are none);
  // the flat penalty mode weights every constraint by this
  int min_disj_leaf_count = 1;
};
TreeStats tree_stats(const RobustnessTree& tree);

// Helpers for the smoothing error bound: the largest number of min nodes on
// any root-to-leaf path, and the largest min-node arity.  Together they
// bound |exact - smoothed| by depth * log(max_arity) / k.
int min_node_depth(const RobustnessTree& tree);
int max_min_arity(const RobustnessTree& tree);

int max_leaf_time(const RobustnessTree& tree);

}  // namespace stlccp

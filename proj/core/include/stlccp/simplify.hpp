#pragma once

#include "stlccp/tree.hpp"

namespace stlccp {

// Collapses same-kind parent/child pairs: a max child of a max node (or min
// of min) is removed and its children and time steps are spliced into the
// parent.  One pass splices one level, so the loop repeats until a pass
// changes nothing; the pass count is bounded by the tree height.  The
// result has no adjacent same-kind internal nodes, evaluates to exactly the
// same value (min/max associativity), keeps the leaf multiset unchanged,
// and is a fixed point of the procedure.
RobustnessTree simplify(const RobustnessTree& tree);

// True when no internal node has a non-leaf child of its own kind.
bool is_simplified(const RobustnessTree& tree);

}  // namespace stlccp

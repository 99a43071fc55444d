#pragma once

#include "stlccp/formula.hpp"
#include "stlccp/smoothers.hpp"
#include "stlccp/trajectory.hpp"

namespace stlccp {

// Classic quantitative semantics: a predicate scores -(a'x_t - b), i.e.
// positive inside the satisfied region; And/Always take min over operands
// or window, Or/Eventually take max.  rho >= 0 implies the boolean
// property holds, rho < 0 implies it does not.
double eval_robustness_orig(const Formula& f, const Trajectory& traj, int t = 0,
                            UntilSemantics until = UntilSemantics::Standard);

// Reversed score: a predicate scores a'x_t - b directly and min/max trade
// places, so satisfaction now means rho_rev <= 0.  Identity with the
// classic score: rho_rev == -rho_orig pointwise.  `smoother` replaces every
// min in the recursion (disjunctive side); max stays exact.
double eval_robustness_rev(const Formula& f, const Trajectory& traj, int t = 0,
                           Smoother smoother = Smoother::exact(),
                           UntilSemantics until = UntilSemantics::Standard);

}  // namespace stlccp

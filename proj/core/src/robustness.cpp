#include "stlccp/robustness.hpp"

#include <algorithm>
#include <limits>

namespace stlccp {

namespace {

void check_window(const Trajectory& traj, const Formula& f, int t) {
  if (t < 0) throw std::invalid_argument("evaluation time must be nonnegative");
  int need = t + formula_length(f);
  if (need > traj.horizon()) {
    throw HorizonError("trajectory horizon " + std::to_string(traj.horizon()) +
                       " too short: formula needs samples up to t=" +
                       std::to_string(need));
  }
}

// Reversed semantics: predicates score their raw margin a'x - b, And/Always
// aggregate with max, Or/Eventually with min.  `agg_min` is the (possibly
// smoothed) min; max is always exact.
double eval_rev(const Formula& f, const Trajectory& traj, int t,
                const Smoother& sm, UntilSemantics until) {
  switch (f.kind()) {
    case Formula::Kind::Pred:
      return f.predicate().margin(traj.states.row(t).transpose());
    case Formula::Kind::And: {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& c : f.children()) {
        v = std::max(v, eval_rev(c, traj, t, sm, until));
      }
      return v;
    }
    case Formula::Kind::Or: {
      Eigen::VectorXd vals(f.children().size());
      for (size_t i = 0; i < f.children().size(); ++i) {
        vals[static_cast<Eigen::Index>(i)] =
            eval_rev(f.children()[i], traj, t, sm, until);
      }
      return sm(vals);
    }
    case Formula::Kind::Always: {
      double v = -std::numeric_limits<double>::infinity();
      for (int s = t + f.t1(); s <= t + f.t2(); ++s) {
        v = std::max(v, eval_rev(f.child(), traj, s, sm, until));
      }
      return v;
    }
    case Formula::Kind::Eventually: {
      Eigen::VectorXd vals(f.t2() - f.t1() + 1);
      for (int s = t + f.t1(); s <= t + f.t2(); ++s) {
        vals[s - t - f.t1()] = eval_rev(f.child(), traj, s, sm, until);
      }
      return sm(vals);
    }
    case Formula::Kind::Until: {
      const Formula& lhs = f.until_lhs();
      const Formula& rhs = f.until_rhs();
      Eigen::VectorXd outer(f.t2() - f.t1() + 1);
      if (until == UntilSemantics::Standard) {
        // min over t' of max(rhs at t', max of lhs over [t, t']): the
        // left operand covers the whole prefix up to the witness time.
        for (int tp = t + f.t1(); tp <= t + f.t2(); ++tp) {
          double v = eval_rev(rhs, traj, tp, sm, until);
          for (int ts = t; ts <= tp; ++ts) {
            v = std::max(v, eval_rev(lhs, traj, ts, sm, until));
          }
          outer[tp - t - f.t1()] = v;
        }
        return sm(outer);
      }
      // PaperLiteral: max over t' of min(lhs at t', min of rhs over
      // [t+t1, t']), with the inner window anchored at the interval start.
      // The two mins are applied nested, mirroring the tree construction,
      // so smoothed evaluation agrees between formula and tree.
      double best = -std::numeric_limits<double>::infinity();
      for (int tp = t + f.t1(); tp <= t + f.t2(); ++tp) {
        Eigen::VectorXd window(tp - t - f.t1() + 1);
        for (int ts = t + f.t1(); ts <= tp; ++ts) {
          window[ts - t - f.t1()] = eval_rev(rhs, traj, ts, sm, until);
        }
        Eigen::Vector2d pair(eval_rev(lhs, traj, tp, sm, until), sm(window));
        best = std::max(best, sm(pair));
      }
      return best;
    }
  }
  throw std::logic_error("unreachable formula kind");
}

}  // namespace

double eval_robustness_rev(const Formula& f, const Trajectory& traj, int t,
                           Smoother smoother, UntilSemantics until) {
  check_window(traj, f, t);
  return eval_rev(f, traj, t, smoother, until);
}

double eval_robustness_orig(const Formula& f, const Trajectory& traj, int t,
                            UntilSemantics until) {
  // The reversed score is the exact negation of the classic one, so evaluate
  // once and flip; this keeps the identity bit-exact.
  return -eval_robustness_rev(f, traj, t, Smoother::exact(), until);
}

}  // namespace stlccp

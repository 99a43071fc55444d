#include <benchmark/benchmark.h>

#include <string>

#include "stlccp/dc_program.hpp"
#include "stlccp/scenario.hpp"
#include "stlccp/simplify.hpp"
#include "stlccp/tree.hpp"

namespace {

using namespace stlccp;

Scenario bundled(const std::string& name) {
  return load_scenario(std::string(STLCCP_SCENARIO_DIR) + "/" + name + ".json");
}

void BM_BuildAndSimplifyTree(benchmark::State& state) {
  Scenario s = bundled("many_target");
  const int T = static_cast<int>(state.range(0));
  Formula spec = build_scenario_spec(s, T);
  for (auto _ : state) {
    RobustnessTree tree =
        simplify(build_tree(spec, 0, UntilSemantics::Standard, T));
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(BM_BuildAndSimplifyTree)->Arg(25)->Arg(50)->Arg(100);

void BM_EvalTree(benchmark::State& state) {
  Scenario s = bundled("many_target");
  const int T = static_cast<int>(state.range(0));
  Formula spec = build_scenario_spec(s, T);
  RobustnessTree tree =
      simplify(build_tree(spec, 0, UntilSemantics::Standard, T));
  Trajectory traj;
  traj.states = Eigen::MatrixXd::Zero(T + 1, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_tree(tree, traj, Smoother::mellow(1000.0)));
  }
}
BENCHMARK(BM_EvalTree)->Arg(25)->Arg(100);

void BM_Decompose(benchmark::State& state) {
  Scenario s = bundled("many_target");
  const int T = static_cast<int>(state.range(0));
  Formula spec = build_scenario_spec(s, T);
  RobustnessTree tree =
      simplify(build_tree(spec, 0, UntilSemantics::Standard, T));
  for (auto _ : state) {
    DcProgram p =
        decompose(tree, s.system, s.x0, T, s.bounds, s.quad, s.x0_pinned);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_Decompose)->Arg(25)->Arg(50);

}  // namespace

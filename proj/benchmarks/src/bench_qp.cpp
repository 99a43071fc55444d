#include <benchmark/benchmark.h>

#include <string>

#include "stlccp/ccp.hpp"
#include "stlccp/dc_program.hpp"
#include "stlccp/scenario.hpp"
#include "stlccp/simplify.hpp"

namespace {

using namespace stlccp;

// first convex subproblem of the staged pipeline on a bundled scenario,
// the workload the solver actually sees
QpProblem scenario_subproblem(const std::string& name, int T) {
  Scenario s =
      load_scenario(std::string(STLCCP_SCENARIO_DIR) + "/" + name + ".json");
  Formula spec = build_scenario_spec(s, T);
  RobustnessTree tree =
      simplify(build_tree(spec, 0, UntilSemantics::Standard, T));
  DcProgram p =
      decompose(tree, s.system, s.x0, T, s.bounds, s.quad, s.x0_pinned);

  CcpConfig cfg;
  CcpState state;
  state.z = Eigen::VectorXd::Zero(p.var_count());
  propagate_aux(p, state.z, cfg.smoother);
  state.tau = cfg.tau0;
  state.iter = 0;
  return assemble_subproblem(p, state, cfg);
}

void BM_SolveScenarioSubproblem(benchmark::State& state) {
  QpProblem qp = scenario_subproblem("many_target", 25);
  for (auto _ : state) {
    QpSolution sol = solve_qp(qp);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(BM_SolveScenarioSubproblem)->Unit(benchmark::kMillisecond);

void BM_FullStagedPipeline(benchmark::State& state) {
  Scenario s = load_scenario(std::string(STLCCP_SCENARIO_DIR) +
                             "/two_target.json");
  Formula spec = build_scenario_spec(s, 25);
  RobustnessTree tree =
      simplify(build_tree(spec, 0, UntilSemantics::Standard, 25));
  DcProgram p =
      decompose(tree, s.system, s.x0, 25, s.bounds, s.quad, s.x0_pinned);
  CcpConfig cfg;
  for (auto _ : state) {
    WarmStartResult res = warm_start_pipeline(p, cfg);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_FullStagedPipeline)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

// stlccp command line: synthesize trajectories for STL specs, validate
// trajectories against scenarios, and run benchmark batteries.
//
// Exit codes (stable contract):
//   0  success (synth: converged with nonnegative robustness)
//   2  parse error (scenario JSON, formula text, CSV)
//   3  horizon too short / trajectory length mismatch
//   4  subproblem failure (convex rows infeasible)
//   5  finished without converging, or converged with negative robustness
//   1  unexpected internal error

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "stlccp/ccp.hpp"
#include "stlccp/dc_program.hpp"
#include "stlccp/parser.hpp"
#include "stlccp/robustness.hpp"
#include "stlccp/scenario.hpp"
#include "stlccp/simplify.hpp"
#include "stlccp/tree.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace stlccp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitHorizon = 3;
constexpr int kExitSubproblem = 4;
constexpr int kExitNotConverged = 5;

bool log_enabled() {
  const char* v = std::getenv("STLCCP_LOG");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

struct SynthOptions {
  std::string scenario_path;
  int horizon = 0;  // 0 = use the scenario's own
  std::string mode = "twp";
  double decay_r = 0.2;
  std::string smoother = "warmstart";
  double k_lse = 10.0;
  double k_mellow = 1000.0;
  unsigned seed = 0;
  double sigma = 0.1;
  int max_iter = 25;
  std::string out_dir = ".";
  std::string until = "standard";
  bool quiet = false;  // bench suppresses per-run stdout
};

PenaltyMode parse_mode(const std::string& s) {
  if (s == "twp") return PenaltyMode::Twp;
  if (s == "normal") return PenaltyMode::Normal;
  if (s == "decay") return PenaltyMode::Decay;
  throw CLI::ValidationError("--mode", "expected twp|normal|decay");
}

UntilSemantics parse_until(const std::string& s) {
  if (s == "standard") return UntilSemantics::Standard;
  if (s == "paper-literal") return UntilSemantics::PaperLiteral;
  throw CLI::ValidationError("--until", "expected standard|paper-literal");
}

json record_to_json(const IterationRecord& rec) {
  return json{{"iter", rec.iter},
              {"stage", rec.stage},
              {"tau", rec.tau},
              {"cost", rec.cost},
              {"max_penalty", rec.max_penalty},
              {"qp_status", to_string(rec.qp_status)},
              {"qp_iters", rec.qp_iters},
              {"wall_ms", rec.wall_ms}};
}

struct SynthOutcome {
  int exit_code = kExitInternal;
  SolveStatus status = SolveStatus::SubproblemFailed;
  double robustness = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double wall_ms = 0.0;
  bool sound_certified = false;
};

// Full pipeline for one run: load, build, simplify, decompose, solve, write
// artifacts.  Throws ParseError / HorizonError for the mapped exit codes.
SynthOutcome run_synth(const SynthOptions& opt) {
  Scenario scenario = load_scenario(opt.scenario_path);
  const int T = opt.horizon > 0 ? opt.horizon : scenario.horizon;
  const UntilSemantics until = parse_until(opt.until);

  Formula spec = build_scenario_spec(scenario, T);
  RobustnessTree tree = simplify(build_tree(spec, 0, until, T));
  if (log_enabled()) {
    TreeStats stats = tree_stats(tree);
    std::cerr << "[stlccp] tree: " << stats.n_leaves << " leaves, "
              << stats.n_disj << " disjunctive nodes\n";
  }
  DcProgram program =
      decompose(tree, scenario.system, scenario.x0, T, scenario.bounds,
                scenario.quad, scenario.x0_pinned);

  CcpConfig cfg;
  cfg.mode = parse_mode(opt.mode);
  cfg.decay_rate = opt.decay_r;
  cfg.k_lse = opt.k_lse;
  cfg.k_mellow = opt.k_mellow;
  cfg.seed = opt.seed;
  cfg.init_sigma = opt.sigma;
  cfg.max_iter = opt.max_iter;

  SolveResult result;
  std::vector<IterationRecord> history;
  if (opt.smoother == "warmstart") {
    WarmStartResult ws = warm_start_pipeline(program, cfg);
    history = ws.stage1.history;
    history.insert(history.end(), ws.stage2.history.begin(),
                   ws.stage2.history.end());
    result = ws.final();
    result.wall_ms = ws.stage1.wall_ms + ws.stage2.wall_ms;
  } else if (opt.smoother == "lse") {
    cfg.smoother = Smoother::lse(opt.k_lse);
    result = run_ccp(program, cfg);
    history = result.history;
  } else if (opt.smoother == "mellowmin") {
    cfg.smoother = Smoother::mellow(opt.k_mellow);
    result = run_ccp(program, cfg);
    history = result.history;
  } else {
    throw CLI::ValidationError("--smoother", "expected lse|mellowmin|warmstart");
  }

  SynthOutcome outcome;
  outcome.status = result.status;
  outcome.iterations = result.iterations;
  outcome.wall_ms = result.wall_ms;
  outcome.sound_certified = result.sound_certified;
  if (result.status != SolveStatus::SubproblemFailed) {
    outcome.robustness = eval_robustness_orig(spec, result.trajectory, 0, until);
  }
  if (result.status == SolveStatus::SubproblemFailed) {
    outcome.exit_code = kExitSubproblem;
  } else if (result.status == SolveStatus::Converged &&
             outcome.robustness >= 0.0) {
    outcome.exit_code = kExitOk;
  } else {
    outcome.exit_code = kExitNotConverged;
  }

  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  write_trajectory_csv_file((dir / "trajectory.csv").string(),
                            result.trajectory);
  {
    std::ofstream hist(dir / "history.jsonl");
    for (const auto& rec : history) hist << record_to_json(rec) << "\n";
  }
  json report{{"schema_version", 1},
              {"scenario", scenario.name.empty()
                               ? fs::path(opt.scenario_path).stem().string()
                               : scenario.name},
              {"horizon", T},
              {"mode", opt.mode},
              {"smoother", opt.smoother},
              {"until", opt.until},
              {"seed", opt.seed},
              {"status", to_string(result.status)},
              {"iterations", result.iterations},
              {"wall_ms", result.wall_ms},
              {"objective", result.objective},
              {"sxi", result.sxi},
              {"max_penalty", result.max_penalty},
              {"sound_certified", result.sound_certified},
              {"trajectory", "trajectory.csv"},
              {"history", "history.jsonl"},
              {"exit_code", outcome.exit_code}};
  if (result.status != SolveStatus::SubproblemFailed) {
    report["robustness_orig"] = outcome.robustness;
  }
  std::ofstream rep(dir / "report.json");
  rep << report.dump(2) << "\n";

  if (log_enabled()) {
    for (const auto& rec : history) {
      std::cerr << "[stlccp] stage " << rec.stage << " iter " << rec.iter
                << " tau " << rec.tau << " cost " << rec.cost
                << " max_penalty " << rec.max_penalty << " qp "
                << to_string(rec.qp_status) << "\n";
    }
  }
  if (!opt.quiet) {
    std::cout << "status: " << to_string(result.status) << "\n";
    if (result.status != SolveStatus::SubproblemFailed) {
      std::cout << "robustness: " << outcome.robustness << "\n";
    }
    std::cout << "iterations: " << result.iterations << "\n"
              << "wall_ms: " << result.wall_ms << "\n";
  }
  return outcome;
}

int run_validate(const std::string& scenario_path,
                 const std::string& trajectory_path, int horizon_flag,
                 const std::string& until_text) {
  Scenario scenario = load_scenario(scenario_path);
  Trajectory traj = read_trajectory_csv_file(trajectory_path);
  const UntilSemantics until = parse_until(until_text);
  if (horizon_flag > 0 && horizon_flag != traj.horizon()) {
    throw HorizonError("trajectory horizon " + std::to_string(traj.horizon()) +
                       " does not match requested horizon " +
                       std::to_string(horizon_flag));
  }
  const int T = traj.horizon();
  Formula spec = build_scenario_spec(scenario, T);
  double rho = eval_robustness_orig(spec, traj, 0, until);
  std::cout << "robustness: " << rho << "\n"
            << "verdict: " << (rho >= 0.0 ? "SAT" : "UNSAT") << "\n";
  return rho >= 0.0 ? kExitOk : kExitNotConverged;
}

struct BenchCell {
  std::string scenario;
  int horizon;
  std::string mode;
  std::string smoother;
};

struct BenchRun {
  BenchCell cell;
  unsigned seed;
  SynthOutcome outcome;
  bool threw = false;
  std::string error;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

int run_bench(const std::vector<std::string>& scenarios,
              std::vector<int> horizons, std::vector<std::string> modes,
              std::vector<std::string> smoothers, std::vector<unsigned> seeds,
              const SynthOptions& base, int jobs, const std::string& out_csv) {
  if (horizons.empty()) horizons.push_back(0);
  if (modes.empty()) modes.push_back("twp");
  if (smoothers.empty()) smoothers.push_back("warmstart");
  if (seeds.empty()) seeds = {0, 1, 2, 3, 4};

  std::vector<BenchRun> runs;
  for (const auto& sc : scenarios) {
    for (int T : horizons) {
      for (const auto& mode : modes) {
        for (const auto& sm : smoothers) {
          for (unsigned seed : seeds) {
            BenchRun run;
            run.cell = {sc, T, mode, sm};
            run.seed = seed;
            runs.push_back(std::move(run));
          }
        }
      }
    }
  }

  fs::create_directories(base.out_dir);
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= runs.size()) break;
      BenchRun& run = runs[i];
      SynthOptions opt = base;
      opt.scenario_path = run.cell.scenario;
      opt.horizon = run.cell.horizon;
      opt.mode = run.cell.mode;
      opt.smoother = run.cell.smoother;
      opt.seed = run.seed;
      opt.quiet = true;
      std::ostringstream tag;
      tag << fs::path(run.cell.scenario).stem().string() << "_T"
          << run.cell.horizon << "_" << run.cell.mode << "_"
          << run.cell.smoother << "_s" << run.seed;
      opt.out_dir = (fs::path(base.out_dir) / tag.str()).string();
      try {
        run.outcome = run_synth(opt);
      } catch (const std::exception& e) {
        run.threw = true;
        run.error = e.what();
      }
      if (log_enabled()) {
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "[stlccp] bench " << tag.str() << ": "
                  << (run.threw ? run.error : to_string(run.outcome.status))
                  << "\n";
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot write " + out_csv);
  csv << "scenario,horizon,mode,smoother,runs,successes,success_rate,"
         "median_robustness,median_wall_ms\n";
  for (const auto& sc : scenarios) {
    for (int T : horizons) {
      for (const auto& mode : modes) {
        for (const auto& sm : smoothers) {
          int total = 0, successes = 0;
          std::vector<double> rhos, walls;
          for (const auto& run : runs) {
            if (run.cell.scenario != sc || run.cell.horizon != T ||
                run.cell.mode != mode || run.cell.smoother != sm) {
              continue;
            }
            ++total;
            if (run.threw) continue;
            if (run.outcome.exit_code == kExitOk) ++successes;
            if (std::isfinite(run.outcome.robustness)) {
              rhos.push_back(run.outcome.robustness);
            }
            walls.push_back(run.outcome.wall_ms);
          }
          csv << fs::path(sc).stem().string() << "," << T << "," << mode
              << "," << sm << "," << total << "," << successes << ","
              << (total > 0 ? static_cast<double>(successes) / total : 0.0)
              << ",";
          double mr = median(rhos);
          if (std::isfinite(mr)) csv << mr;
          csv << ",";
          double mw = median(walls);
          if (std::isfinite(mw)) csv << mw;
          csv << "\n";
        }
      }
    }
  }
  std::cout << "wrote " << out_csv << " (" << runs.size() << " runs)\n";
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"STL trajectory synthesis via penalty convex-concave iterations"};
  app.require_subcommand(1);

  SynthOptions opt;
  auto* synth = app.add_subcommand("synth", "synthesize a trajectory");
  synth->add_option("--scenario", opt.scenario_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("-T,--horizon", opt.horizon,
                    "horizon override (default: scenario file)");
  synth->add_option("--mode", opt.mode, "penalty mode: twp|normal|decay");
  synth->add_option("--decay-r", opt.decay_r, "decay rate for --mode decay");
  synth->add_option("--smoother", opt.smoother,
                    "min smoothing: lse|mellowmin|warmstart");
  synth->add_option("--k-lse", opt.k_lse, "lse sharpness");
  synth->add_option("--k-mellow", opt.k_mellow, "mellowmin sharpness");
  synth->add_option("--seed", opt.seed, "initialization seed");
  synth->add_option("--sigma", opt.sigma, "initialization stddev");
  synth->add_option("--max-iter", opt.max_iter, "outer iteration cap");
  synth->add_option("--out-dir", opt.out_dir, "artifact directory");
  synth->add_option("--until", opt.until,
                    "until semantics: standard|paper-literal");

  std::string val_scenario, val_trajectory;
  int val_horizon = 0;
  std::string val_until = "standard";
  auto* validate =
      app.add_subcommand("validate", "check a trajectory against a scenario");
  validate->add_option("--scenario", val_scenario, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("--trajectory", val_trajectory, "trajectory CSV file")
      ->required()
      ->check(CLI::ExistingFile);
  validate->add_option("-T,--horizon", val_horizon,
                       "expected horizon (default: from the CSV)");
  validate->add_option("--until", val_until,
                       "until semantics: standard|paper-literal");

  std::vector<std::string> bench_scenarios, bench_modes, bench_smoothers;
  std::vector<int> bench_horizons;
  std::vector<unsigned> bench_seeds;
  int bench_jobs = 1;
  std::string bench_csv;
  SynthOptions bench_base;
  auto* bench = app.add_subcommand("bench", "run a battery of syntheses");
  bench->add_option("--scenario", bench_scenarios, "scenario JSON file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("-T,--horizon", bench_horizons, "horizon(s)");
  bench->add_option("--mode", bench_modes, "penalty mode(s)");
  bench->add_option("--smoother", bench_smoothers, "smoother(s)");
  bench->add_option("--seed", bench_seeds, "seed list (default 0..4)");
  bench->add_option("--jobs", bench_jobs, "concurrent runs");
  bench->add_option("--out-dir", bench_base.out_dir, "artifact directory");
  bench->add_option("--out", bench_csv, "aggregate CSV path");
  bench->add_option("--decay-r", bench_base.decay_r, "decay rate");
  bench->add_option("--k-lse", bench_base.k_lse, "lse sharpness");
  bench->add_option("--k-mellow", bench_base.k_mellow, "mellowmin sharpness");
  bench->add_option("--sigma", bench_base.sigma, "initialization stddev");
  bench->add_option("--max-iter", bench_base.max_iter, "outer iteration cap");
  bench->add_option("--until", bench_base.until,
                    "until semantics: standard|paper-literal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (*synth) return run_synth(opt).exit_code;
  if (*validate) {
    return run_validate(val_scenario, val_trajectory, val_horizon, val_until);
  }
  if (*bench) {
    if (bench_csv.empty()) {
      bench_csv = (fs::path(bench_base.out_dir) / "bench.csv").string();
    }
    return run_bench(bench_scenarios, bench_horizons, bench_modes,
                     bench_smoothers, bench_seeds, bench_base, bench_jobs,
                     bench_csv);
  }
  return kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what();
    if (e.pos() >= 0) std::cerr << " (offset " << e.pos() << ")";
    std::cerr << "\n";
    return kExitParse;
  } catch (const HorizonError& e) {
    std::cerr << "horizon error: " << e.what() << "\n";
    return kExitHorizon;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

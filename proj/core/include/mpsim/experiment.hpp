#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mpsim/runner.hpp"
#include "mpsim/stability.hpp"

namespace mpsim {

struct ExperimentOptions {
  std::string out_dir;  // empty: derived as out/<verb>-<suite hash>
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<ControllerKind> controllers{ControllerKind::kQmp, ControllerKind::kOccMp,
                                          ControllerKind::kRbMp};
  int workers = 0;  // 0: hardware concurrency
  double bus_bonus = 1e6;
  bool log_decisions = false;
  bool write_events = false;

  void validate() const;
};

struct RunTask {
  ScenarioConfig scenario;
  ControllerKind controller = ControllerKind::kQmp;
  std::uint64_t seed = 1;
  int sub_scenario = 0;    // 1..8 when spawned by the matrix, else 0
  double sweep_value = 0;  // sigma %, penetration, or kappa, verb-dependent
};

struct CompletedRun {
  std::string scenario_name;
  std::uint64_t scenario_hash = 0;
  ControllerKind controller = ControllerKind::kQmp;
  std::uint64_t seed = 0;
  int sub_scenario = 0;
  double sweep_value = 0;
  RunOutput output;
};

// Executes every task on a bounded worker pool and returns results in task
// order regardless of completion order. `progress(i)` runs serialized after
// task i completes. Worker exceptions propagate to the caller.
std::vector<CompletedRun> execute(const std::vector<RunTask>& tasks,
                                  const ExperimentOptions& opt,
                                  const std::function<void(int)>& progress = {});

struct SuiteArtifacts {
  std::string out_dir;
  std::vector<std::string> files;  // paths of everything written
};

// One scenario x controllers x seeds. Writes summary.csv, accumulation.csv,
// buckets.csv, manifest.json, and optionally decisions.csv / events.csv.
SuiteArtifacts write_run_suite(const ScenarioConfig& scenario, const ExperimentOptions& opt);

// The eight-row factorial matrix applied to `base`. Writes summary.csv and
// changes.csv (paired percent changes against the queue-weight baseline).
SuiteArtifacts write_matrix_suite(const ScenarioConfig& base, const ExperimentOptions& opt);

// Bus-counting-error sweep on the given matrix rows. Writes apc_runs.csv and
// apc_summary.csv (per-sigma mean and standard error of each aggregate).
SuiteArtifacts write_apc_suite(const ScenarioConfig& base, const std::vector<int>& subs,
                               const std::vector<double>& sigmas,
                               const ExperimentOptions& opt);

// Connected-vehicle penetration sweep. Writes cv_runs.csv, cv_summary.csv,
// and cv_accumulation.csv (per-minute accumulation for every run).
SuiteArtifacts write_cv_suite(const ScenarioConfig& base,
                              const std::vector<double>& penetrations,
                              const ExperimentOptions& opt);

// Isolated-intersection load sweep. Writes stability.csv.
SuiteArtifacts write_stability_suite(const StabilityTrialConfig& base,
                                     const std::vector<double>& kappas,
                                     const std::vector<ControllerKind>& controllers,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& out_dir, int workers = 0);

}  // namespace mpsim

#include "mpsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "mpsim/csv.hpp"
#include "mpsim/version.hpp"

namespace mpsim {

using nlohmann::json;

void ExperimentOptions::validate() const {
  if (seeds.empty()) throw ConfigError("options.seeds: must not be empty");
  std::vector<std::uint64_t> sorted = seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("options.seeds: must be distinct");
  if (controllers.empty()) throw ConfigError("options.controllers: must not be empty");
  if (workers < 0) throw ConfigError("options.workers: must be >= 0");
  if (bus_bonus <= 0) throw ConfigError("options.bus_bonus: must be positive");
}

namespace {

int resolve_workers(int requested, std::size_t n_items) {
  int w = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(w),
                                                std::max<std::size_t>(n_items, 1)));
}

// Runs fn(0..n-1) on `workers` threads; the first exception wins and is
// rethrown on the caller after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (n == 0) return;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto body = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(err_mu);
        if (first_error) return;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string join_csvish(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

// Everything that distinguishes one suite invocation from another, digested
// into the fingerprint used for default output paths and file headers.
std::uint64_t suite_fingerprint(const std::string& verb,
                                const std::vector<std::uint64_t>& scenario_hashes,
                                const ExperimentOptions& opt,
                                const std::vector<double>& sweep_values) {
  std::string s = verb;
  for (std::uint64_t h : scenario_hashes) s += "|" + to_hex(h);
  s += "|controllers=";
  for (ControllerKind c : opt.controllers) s += std::string(to_string(c)) + ",";
  s += "|seeds=";
  for (std::uint64_t v : opt.seeds) s += std::to_string(v) + ",";
  s += "|bonus=" + csv::fmt(opt.bus_bonus);
  s += "|sweep=";
  for (double v : sweep_values) s += csv::fmt(v) + ",";
  return fnv1a64(s);
}

struct Manifest {
  std::string path;
  json doc;

  Manifest(const std::string& dir, const std::string& verb, const std::string& suite_hash,
           const json& scenario_doc, const ExperimentOptions& opt,
           const std::vector<RunTask>& tasks) {
    path = dir + "/manifest.json";
    doc["tool"] = "mpsim";
    doc["version"] = kVersion;
    doc["verb"] = verb;
    doc["suite_hash"] = suite_hash;
    doc["scenario"] = scenario_doc;
    doc["seeds"] = opt.seeds;
    json controllers = json::array();
    for (ControllerKind c : opt.controllers) controllers.push_back(to_string(c));
    doc["controllers"] = controllers;
    doc["complete"] = false;
    json runs = json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      runs.push_back({{"index", i},
                      {"scenario", tasks[i].scenario.name},
                      {"scenario_hash", to_hex(tasks[i].scenario.hash())},
                      {"controller", to_string(tasks[i].controller)},
                      {"seed", tasks[i].seed},
                      {"sub_scenario", tasks[i].sub_scenario},
                      {"sweep_value", tasks[i].sweep_value},
                      {"status", "pending"}});
    }
    doc["runs"] = runs;
    flush();
  }

  void mark_done(std::size_t index) {
    doc["runs"][index]["status"] = "done";
    flush();
  }

  void complete() {
    doc["complete"] = true;
    flush();
  }

  void flush() { csv::write_file_atomic(path, doc.dump(2) + "\n"); }
};

csv::Table make_table(std::vector<std::string> columns, const std::string& suite_hash) {
  csv::Table t(std::move(columns));
  t.comment(std::string("tool=mpsim version=") + kVersion);
  t.comment("config_hash=" + suite_hash);
  return t;
}

constexpr int kMetricCount = 3;
const char* metric_name(int m) {
  switch (m) {
    case 0: return "private_vtt_h";
    case 1: return "bus_vtt_h";
    default: return "ptt_pax_h";
  }
}
double metric_value(const RunAggregates& a, int m) {
  switch (m) {
    case 0: return a.private_vtt_h;
    case 1: return a.bus_vtt_h;
    default: return a.ptt_pax_h;
  }
}

void append_aggregate_cells(std::vector<std::string>& row, const RunAggregates& a) {
  row.push_back(csv::fmt(a.private_vtt_h));
  row.push_back(csv::fmt(a.bus_vtt_h));
  row.push_back(csv::fmt(a.ptt_pax_h));
  row.push_back(csv::fmt(a.private_count));
  row.push_back(csv::fmt(a.bus_count));
  row.push_back(csv::fmt(a.censored));
  row.push_back(csv::fmt(a.final_accumulation));
}

const std::vector<std::string> kAggregateColumns = {
    "private_vtt_h", "bus_vtt_h",  "ptt_pax_h",         "private_count",
    "bus_count",     "censored",   "final_accumulation"};

std::vector<std::string> with_prefix(std::vector<std::string> prefix,
                                     const std::vector<std::string>& tail) {
  prefix.insert(prefix.end(), tail.begin(), tail.end());
  return prefix;
}

std::string write_table(const std::string& dir, const std::string& name,
                        const csv::Table& t) {
  std::string path = dir + "/" + name;
  csv::write_file_atomic(path, t.render());
  return path;
}

}  // namespace

std::vector<CompletedRun> execute(const std::vector<RunTask>& tasks,
                                  const ExperimentOptions& opt,
                                  const std::function<void(int)>& progress) {
  opt.validate();
  std::vector<CompletedRun> results(tasks.size());
  std::mutex progress_mu;
  parallel_for(tasks.size(), resolve_workers(opt.workers, tasks.size()), [&](std::size_t i) {
    const RunTask& task = tasks[i];
    RunRequest req;
    req.scenario = task.scenario;
    req.controller.kind = task.controller;
    req.controller.bus_bonus = opt.bus_bonus;
    req.seed = task.seed;
    req.log_decisions = opt.log_decisions;
    CompletedRun done;
    done.scenario_name = task.scenario.name;
    done.scenario_hash = task.scenario.hash();
    done.controller = task.controller;
    done.seed = task.seed;
    done.sub_scenario = task.sub_scenario;
    done.sweep_value = task.sweep_value;
    done.output = run_single(req);
    results[i] = std::move(done);
    if (progress) {
      std::lock_guard<std::mutex> lock(progress_mu);
      progress(static_cast<int>(i));
    }
  });
  return results;
}

SuiteArtifacts write_run_suite(const ScenarioConfig& scenario, const ExperimentOptions& opt) {
  opt.validate();
  scenario.validate();

  std::vector<RunTask> tasks;
  for (ControllerKind c : opt.controllers)
    for (std::uint64_t seed : opt.seeds) tasks.push_back({scenario, c, seed, 0, 0});

  const std::string suite_hash =
      to_hex(suite_fingerprint("run", {scenario.hash()}, opt, {}));
  SuiteArtifacts art;
  art.out_dir = opt.out_dir.empty() ? "out/run-" + suite_hash : opt.out_dir;

  Manifest manifest(art.out_dir, "run", suite_hash,
                    json::parse(scenario.to_json_string(0)), opt, tasks);
  std::vector<CompletedRun> runs =
      execute(tasks, opt, [&](int i) { manifest.mark_done(static_cast<std::size_t>(i)); });

  csv::Table summary = make_table(
      with_prefix({"scenario", "controller", "seed", "scenario_hash"}, kAggregateColumns),
      suite_hash);
  csv::Table accumulation = make_table(
      {"scenario", "controller", "seed", "time_s", "entered", "exited", "accumulation"},
      suite_hash);
  csv::Table buckets = make_table(
      {"scenario", "controller", "seed", "bucket", "count", "total_time_h", "mean_time_s"},
      suite_hash);
  csv::Table decisions = make_table(
      {"scenario", "controller", "seed", "step", "intersection", "phase", "pressures"},
      suite_hash);
  csv::Table events = make_table({"scenario", "controller", "seed", "vehicle", "class",
                                  "occupancy", "entry_s", "exit_s", "censored"},
                                 suite_hash);

  for (const CompletedRun& r : runs) {
    std::vector<std::string> key = {r.scenario_name, to_string(r.controller),
                                    csv::fmt(r.seed)};
    std::vector<std::string> row = key;
    row.push_back(to_hex(r.scenario_hash));
    append_aggregate_cells(row, r.output.aggregates);
    summary.row(row);

    for (const LedgerSample& s : r.output.metrics.accumulation)
      accumulation.row(with_prefix(key, {csv::fmt(s.time_s), csv::fmt(s.entered),
                                         csv::fmt(s.exited), csv::fmt(s.accumulation)}));

    for (int b = 0; b < kOccupancyBuckets; ++b) {
      const BucketStat& bs = r.output.aggregates.buckets[static_cast<std::size_t>(b)];
      buckets.row(with_prefix(key, {bucket_label(b), csv::fmt(bs.count),
                                    csv::fmt(bs.total_time_h), csv::fmt(bs.mean_time_s)}));
    }

    if (opt.log_decisions) {
      for (const DecisionRecord& d : r.output.decisions) {
        std::vector<std::string> ps;
        for (double p : d.pressures) ps.push_back(csv::fmt(p));
        decisions.row(with_prefix(key, {csv::fmt(d.step), csv::fmt(d.intersection),
                                        csv::fmt(d.phase), join_csvish(ps)}));
      }
    }
    if (opt.write_events) {
      const std::vector<VehicleRecord>& ledger = r.output.metrics.ledger;
      for (std::size_t v = 0; v < ledger.size(); ++v) {
        const VehicleRecord& rec = ledger[v];
        events.row(with_prefix(
            key, {csv::fmt(static_cast<long long>(v)),
                  rec.klass == VehicleClass::kBus ? "bus" : "car", csv::fmt(rec.occupancy),
                  csv::fmt(rec.entry_s), csv::fmt(rec.exit_s),
                  csv::fmt(static_cast<int>(rec.censored))}));
      }
    }
  }

  art.files.push_back(write_table(art.out_dir, "summary.csv", summary));
  art.files.push_back(write_table(art.out_dir, "accumulation.csv", accumulation));
  art.files.push_back(write_table(art.out_dir, "buckets.csv", buckets));
  if (opt.log_decisions)
    art.files.push_back(write_table(art.out_dir, "decisions.csv", decisions));
  if (opt.write_events) art.files.push_back(write_table(art.out_dir, "events.csv", events));
  manifest.complete();
  art.files.push_back(manifest.path);
  return art;
}

SuiteArtifacts write_matrix_suite(const ScenarioConfig& base, const ExperimentOptions& opt) {
  opt.validate();
  base.validate();

  std::array<SubScenario, 8> matrix = scenario_matrix();
  std::vector<RunTask> tasks;
  std::vector<std::uint64_t> hashes;
  for (int sub = 1; sub <= 8; ++sub) {
    ScenarioConfig cfg = base;
    apply_levels(cfg, matrix[static_cast<std::size_t>(sub - 1)]);
    cfg.name = base.name + "-s" + std::to_string(sub);
    hashes.push_back(cfg.hash());
    for (ControllerKind c : opt.controllers)
      for (std::uint64_t seed : opt.seeds) tasks.push_back({cfg, c, seed, sub, 0});
  }

  const std::string suite_hash = to_hex(suite_fingerprint("matrix", hashes, opt, {}));
  SuiteArtifacts art;
  art.out_dir = opt.out_dir.empty() ? "out/matrix-" + suite_hash : opt.out_dir;

  Manifest manifest(art.out_dir, "matrix", suite_hash,
                    json::parse(base.to_json_string(0)), opt, tasks);
  std::vector<CompletedRun> runs =
      execute(tasks, opt, [&](int i) { manifest.mark_done(static_cast<std::size_t>(i)); });

  csv::Table summary = make_table(
      with_prefix({"scenario", "sub_scenario", "controller", "seed", "scenario_hash"},
                  kAggregateColumns),
      suite_hash);
  for (const CompletedRun& r : runs) {
    std::vector<std::string> row = {r.scenario_name, csv::fmt(r.sub_scenario),
                                    to_string(r.controller), csv::fmt(r.seed),
                                    to_hex(r.scenario_hash)};
    append_aggregate_cells(row, r.output.aggregates);
    summary.row(row);
  }

  // Paired percent changes against the queue-weight baseline, per sub-scenario.
  csv::Table changes = make_table(
      {"scenario", "sub_scenario", "controller", "metric", "mean_pct", "se_pct"},
      suite_hash);
  bool have_baseline = std::find(opt.controllers.begin(), opt.controllers.end(),
                                 ControllerKind::kQmp) != opt.controllers.end();
  if (have_baseline) {
    auto find_value = [&](int sub, ControllerKind c, std::uint64_t seed, int metric) {
      for (const CompletedRun& r : runs)
        if (r.sub_scenario == sub && r.controller == c && r.seed == seed)
          return metric_value(r.output.aggregates, metric);
      throw InvariantViolation("matrix: missing run while building changes table");
    };
    for (int sub = 1; sub <= 8; ++sub) {
      for (ControllerKind c : opt.controllers) {
        if (c == ControllerKind::kQmp) continue;
        for (int m = 0; m < kMetricCount; ++m) {
          std::vector<double> values, baselines;
          for (std::uint64_t seed : opt.seeds) {
            values.push_back(find_value(sub, c, seed, m));
            baselines.push_back(find_value(sub, ControllerKind::kQmp, seed, m));
          }
          MeanSe stat = paired_percent_change(values, baselines);
          changes.row({base.name + "-s" + std::to_string(sub), csv::fmt(sub), to_string(c),
                       metric_name(m), csv::fmt(stat.mean), csv::fmt(stat.se)});
        }
      }
    }
  }

  art.files.push_back(write_table(art.out_dir, "summary.csv", summary));
  art.files.push_back(write_table(art.out_dir, "changes.csv", changes));
  manifest.complete();
  art.files.push_back(manifest.path);
  return art;
}

SuiteArtifacts write_apc_suite(const ScenarioConfig& base, const std::vector<int>& subs,
                               const std::vector<double>& sigmas,
                               const ExperimentOptions& opt) {
  opt.validate();
  base.validate();
  if (subs.empty()) throw ConfigError("apc: sub-scenario list must not be empty");
  for (int s : subs)
    if (s < 1 || s > 8) throw ConfigError("apc: sub-scenario must be in 1..8");
  if (sigmas.empty()) throw ConfigError("apc: sigma list must not be empty");
  for (double s : sigmas)
    if (s < 0) throw ConfigError("apc: sigma must be >= 0");

  std::array<SubScenario, 8> matrix = scenario_matrix();
  std::vector<RunTask> tasks;
  std::vector<std::uint64_t> hashes;
  for (int sub : subs) {
    for (double sigma : sigmas) {
      ScenarioConfig cfg = base;
      apply_levels(cfg, matrix[static_cast<std::size_t>(sub - 1)]);
      // Bus-counting error only matters when controllers read average
      // occupancies rather than exact per-vehicle values.
      cfg.sensing.mode = PrivateOccupancyMode::kFixedAverage;
      cfg.sensing.apc_sigma_pct = sigma;
      cfg.name = base.name + "-s" + std::to_string(sub) + "-sigma" + csv::fmt(sigma);
      hashes.push_back(cfg.hash());
      for (ControllerKind c : opt.controllers)
        for (std::uint64_t seed : opt.seeds) tasks.push_back({cfg, c, seed, sub, sigma});
    }
  }

  const std::string suite_hash = to_hex(suite_fingerprint("apc", hashes, opt, sigmas));
  SuiteArtifacts art;
  art.out_dir = opt.out_dir.empty() ? "out/apc-" + suite_hash : opt.out_dir;

  Manifest manifest(art.out_dir, "apc-sweep", suite_hash,
                    json::parse(base.to_json_string(0)), opt, tasks);
  std::vector<CompletedRun> runs =
      execute(tasks, opt, [&](int i) { manifest.mark_done(static_cast<std::size_t>(i)); });

  csv::Table per_run = make_table(
      with_prefix({"scenario", "sub_scenario", "controller", "sigma_pct", "seed",
                   "scenario_hash"},
                  kAggregateColumns),
      suite_hash);
  for (const CompletedRun& r : runs) {
    std::vector<std::string> row = {r.scenario_name,         csv::fmt(r.sub_scenario),
                                    to_string(r.controller), csv::fmt(r.sweep_value),
                                    csv::fmt(r.seed),        to_hex(r.scenario_hash)};
    append_aggregate_cells(row, r.output.aggregates);
    per_run.row(row);
  }

  csv::Table summary = make_table(
      {"scenario", "sub_scenario", "controller", "sigma_pct", "metric", "mean", "se"},
      suite_hash);
  for (int sub : subs) {
    for (double sigma : sigmas) {
      for (ControllerKind c : opt.controllers) {
        for (int m = 0; m < kMetricCount; ++m) {
          std::vector<double> values;
          std::string name;
          for (const CompletedRun& r : runs) {
            if (r.sub_scenario == sub && r.sweep_value == sigma && r.controller == c) {
              values.push_back(metric_value(r.output.aggregates, m));
              name = r.scenario_name;
            }
          }
          MeanSe stat = summarize(values);
          summary.row({name, csv::fmt(sub), to_string(c), csv::fmt(sigma), metric_name(m),
                       csv::fmt(stat.mean), csv::fmt(stat.se)});
        }
      }
    }
  }

  art.files.push_back(write_table(art.out_dir, "apc_runs.csv", per_run));
  art.files.push_back(write_table(art.out_dir, "apc_summary.csv", summary));
  manifest.complete();
  art.files.push_back(manifest.path);
  return art;
}

SuiteArtifacts write_cv_suite(const ScenarioConfig& base,
                              const std::vector<double>& penetrations,
                              const ExperimentOptions& opt) {
  opt.validate();
  base.validate();
  if (penetrations.empty()) throw ConfigError("cv: penetration list must not be empty");
  for (double p : penetrations)
    if (p <= 0 || p > 1) throw ConfigError("cv: penetration must be in (0, 1]");

  std::vector<RunTask> tasks;
  std::vector<std::uint64_t> hashes;
  for (double p : penetrations) {
    ScenarioConfig cfg = base;
    cfg.sensing.mode = PrivateOccupancyMode::kExact;
    cfg.sensing.cv_penetration = p;
    cfg.name = base.name + "-p" + csv::fmt(p);
    hashes.push_back(cfg.hash());
    for (ControllerKind c : opt.controllers)
      for (std::uint64_t seed : opt.seeds) tasks.push_back({cfg, c, seed, 0, p});
  }

  const std::string suite_hash = to_hex(suite_fingerprint("cv", hashes, opt, penetrations));
  SuiteArtifacts art;
  art.out_dir = opt.out_dir.empty() ? "out/cv-" + suite_hash : opt.out_dir;

  Manifest manifest(art.out_dir, "cv-sweep", suite_hash,
                    json::parse(base.to_json_string(0)), opt, tasks);
  std::vector<CompletedRun> runs =
      execute(tasks, opt, [&](int i) { manifest.mark_done(static_cast<std::size_t>(i)); });

  csv::Table per_run = make_table(
      with_prefix({"scenario", "controller", "penetration", "seed", "scenario_hash"},
                  kAggregateColumns),
      suite_hash);
  csv::Table accumulation = make_table(
      {"scenario", "controller", "penetration", "seed", "time_s", "accumulation"},
      suite_hash);
  for (const CompletedRun& r : runs) {
    std::vector<std::string> row = {r.scenario_name, to_string(r.controller),
                                    csv::fmt(r.sweep_value), csv::fmt(r.seed),
                                    to_hex(r.scenario_hash)};
    append_aggregate_cells(row, r.output.aggregates);
    per_run.row(row);
    for (const LedgerSample& s : r.output.metrics.accumulation)
      accumulation.row({r.scenario_name, to_string(r.controller), csv::fmt(r.sweep_value),
                        csv::fmt(r.seed), csv::fmt(s.time_s), csv::fmt(s.accumulation)});
  }

  csv::Table summary = make_table(
      {"scenario", "controller", "penetration", "metric", "mean", "se"}, suite_hash);
  for (double p : penetrations) {
    for (ControllerKind c : opt.controllers) {
      for (int m = 0; m < kMetricCount; ++m) {
        std::vector<double> values;
        std::string name;
        for (const CompletedRun& r : runs) {
          if (r.sweep_value == p && r.controller == c) {
            values.push_back(metric_value(r.output.aggregates, m));
            name = r.scenario_name;
          }
        }
        MeanSe stat = summarize(values);
        summary.row({name, to_string(c), csv::fmt(p), metric_name(m), csv::fmt(stat.mean),
                     csv::fmt(stat.se)});
      }
    }
  }

  art.files.push_back(write_table(art.out_dir, "cv_runs.csv", per_run));
  art.files.push_back(write_table(art.out_dir, "cv_summary.csv", summary));
  art.files.push_back(write_table(art.out_dir, "cv_accumulation.csv", accumulation));
  manifest.complete();
  art.files.push_back(manifest.path);
  return art;
}

SuiteArtifacts write_stability_suite(const StabilityTrialConfig& base,
                                     const std::vector<double>& kappas,
                                     const std::vector<ControllerKind>& controllers,
                                     const std::vector<std::uint64_t>& seeds,
                                     const std::string& out_dir, int workers) {
  if (kappas.empty()) throw ConfigError("stability: kappa list must not be empty");
  for (double k : kappas)
    if (k <= 0) throw ConfigError("stability: kappa must be positive");
  if (controllers.empty()) throw ConfigError("stability: controller list must not be empty");
  if (seeds.empty()) throw ConfigError("stability: seed list must not be empty");

  struct Trial {
    ControllerKind controller;
    double kappa;
    std::uint64_t seed;
  };
  std::vector<Trial> trials;
  for (ControllerKind c : controllers)
    for (double k : kappas)
      for (std::uint64_t s : seeds) trials.push_back({c, k, s});

  std::string fingerprint_src = "stability";
  for (const Trial& t : trials)
    fingerprint_src += "|" + std::string(to_string(t.controller)) + ":" +
                       csv::fmt(t.kappa) + ":" + std::to_string(t.seed);
  fingerprint_src += "|horizon=" + std::to_string(base.horizon_steps);
  const std::string suite_hash = to_hex(fnv1a64(fingerprint_src));

  SuiteArtifacts art;
  art.out_dir = out_dir.empty() ? "out/stability-" + suite_hash : out_dir;

  std::vector<StabilityTrialOutcome> outcomes(trials.size());
  parallel_for(trials.size(), resolve_workers(workers, trials.size()),
               [&](std::size_t i) {
                 StabilityTrialConfig cfg = base;
                 cfg.controller = trials[i].controller;
                 cfg.kappa = trials[i].kappa;
                 outcomes[i] = run_stability_trial(cfg, trials[i].seed);
               });

  csv::Table table = make_table({"controller", "kappa", "seed", "verdict", "q2_mean",
                                 "q4_mean", "slope_veh_per_step",
                                 "excess_rate_veh_per_step", "boundary_scale"},
                                suite_hash);
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const StabilityTrialOutcome& o = outcomes[i];
    table.row({to_string(trials[i].controller), csv::fmt(trials[i].kappa),
               csv::fmt(trials[i].seed), to_string(o.verdict), csv::fmt(o.q2_mean),
               csv::fmt(o.q4_mean), csv::fmt(o.slope_veh_per_step),
               csv::fmt(o.excess_rate_veh_per_step), csv::fmt(o.boundary_scale)});
  }
  art.files.push_back(write_table(art.out_dir, "stability.csv", table));
  return art;
}

}  // namespace mpsim

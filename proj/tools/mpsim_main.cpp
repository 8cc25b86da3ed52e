#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpsim/experiment.hpp"
#include "mpsim/version.hpp"

namespace {

using namespace mpsim;

ScenarioConfig load_scenario(const std::string& file, const std::string& preset) {
  if (!file.empty()) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open scenario file '" + file + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return ScenarioConfig::from_json_string(ss.str());
  }
  if (preset == "desk") return desk_preset();
  if (preset == "full") return full_preset();
  throw ConfigError("unknown preset '" + preset + "' (expected 'desk' or 'full')");
}

std::vector<ControllerKind> parse_controllers(const std::vector<std::string>& names) {
  std::vector<ControllerKind> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.push_back(controller_from_string(n));
  return out;
}

void apply_sub_scenario(ScenarioConfig& cfg, int sub) {
  if (sub == 0) return;
  if (sub < 1 || sub > 8) throw ConfigError("--sub must be in 1..8");
  apply_levels(cfg, scenario_matrix()[static_cast<std::size_t>(sub - 1)]);
  cfg.name += "-s" + std::to_string(sub);
}

void report(const SuiteArtifacts& art) {
  for (const std::string& f : art.files) std::cout << "wrote " << f << "\n";
}

struct CommonArgs {
  std::string scenario_file;
  std::string preset = "desk";
  std::vector<std::string> controllers{"q-mp", "occ-mp", "rb-mp"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::string out_dir;
  int workers = 0;
  double bus_bonus = 1e6;

  void attach(CLI::App* cmd, bool with_scenario = true) {
    if (with_scenario) {
      cmd->add_option("--scenario", scenario_file,
                      "Scenario JSON file (overrides --preset)");
      cmd->add_option("--preset", preset, "Built-in scenario preset: desk or full")
          ->capture_default_str();
    }
    cmd->add_option("--controllers", controllers,
                    "Controllers to run: q-mp, occ-mp, rb-mp")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seeds", seeds, "Master seeds, one run per seed")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--out", out_dir,
                    "Output directory (default: out/<verb>-<config hash>)");
    cmd->add_option("--workers", workers, "Worker threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_option("--bus-bonus", bus_bonus,
                    "Additive pressure constant for bus-bearing movements")
        ->capture_default_str();
  }

  ExperimentOptions options() const {
    ExperimentOptions opt;
    opt.out_dir = out_dir;
    opt.seeds = seeds;
    opt.controllers = parse_controllers(controllers);
    opt.workers = workers;
    opt.bus_bonus = bus_bonus;
    return opt;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesoscopic max-pressure signal control simulator"};
  app.set_version_flag("--version", mpsim::kVersion);
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one scenario across controllers and seeds");
  CommonArgs run_args;
  run_args.attach(run_cmd);
  int run_sub = 0;
  double run_sigma = -1, run_penetration = -1;
  std::string run_mode;
  bool run_decisions = false, run_events = false;
  run_cmd->add_option("--sub", run_sub, "Apply sub-scenario row 1..8 before running")
      ->capture_default_str();
  run_cmd->add_option("--sigma", run_sigma, "Override bus count error std, percent");
  run_cmd->add_option("--penetration", run_penetration,
                      "Override connected-vehicle penetration in (0,1]");
  run_cmd->add_option("--occupancy-mode", run_mode,
                      "Override controller view of car occupancy: exact or fixed_average");
  run_cmd->add_flag("--decisions", run_decisions, "Also write per-tick phase decisions");
  run_cmd->add_flag("--events", run_events, "Also write the per-vehicle trip ledger");

  // matrix
  auto* matrix_cmd =
      app.add_subcommand("matrix", "Run all eight demand/frequency/occupancy sub-scenarios");
  CommonArgs matrix_args;
  matrix_args.attach(matrix_cmd);

  // apc-sweep
  auto* apc_cmd = app.add_subcommand(
      "apc-sweep", "Sweep the bus occupancy-count error std over sub-scenarios");
  CommonArgs apc_args;
  apc_args.controllers = {"occ-mp"};
  apc_args.attach(apc_cmd);
  std::vector<double> apc_sigmas{0, 10, 20, 30, 40};
  std::vector<int> apc_subs{1, 3};
  apc_cmd->add_option("--sigmas", apc_sigmas, "Error stds to sweep, percent")
      ->delimiter(',')
      ->capture_default_str();
  apc_cmd->add_option("--subs", apc_subs, "Sub-scenario rows to sweep")
      ->delimiter(',')
      ->capture_default_str();

  // cv-sweep
  auto* cv_cmd = app.add_subcommand(
      "cv-sweep", "Sweep the connected-vehicle penetration rate");
  CommonArgs cv_args;
  cv_args.attach(cv_cmd);
  std::vector<double> cv_penetrations{0.2, 0.4, 0.6, 0.8, 1.0};
  int cv_sub = 1;
  cv_cmd->add_option("--penetrations", cv_penetrations, "Penetration rates in (0,1]")
      ->delimiter(',')
      ->capture_default_str();
  cv_cmd->add_option("--sub", cv_sub, "Sub-scenario row applied to the base config")
      ->capture_default_str();

  // stability
  auto* stab_cmd = app.add_subcommand(
      "stability", "Isolated-intersection load sweep around the feasibility boundary");
  CommonArgs stab_args;
  stab_args.controllers = {"occ-mp"};
  stab_args.attach(stab_cmd, /*with_scenario=*/false);
  std::vector<double> kappas{0.8, 1.2};
  long long stab_horizon = 20000;
  int stab_interval = 10;
  stab_cmd->add_option("--kappas", kappas, "Demand scales relative to the boundary")
      ->delimiter(',')
      ->capture_default_str();
  stab_cmd->add_option("--horizon", stab_horizon, "Trial length in steps (>= 5000)")
      ->capture_default_str();
  stab_cmd->add_option("--interval", stab_interval, "Control interval in steps")
      ->capture_default_str();

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Check a scenario file and print its hash");
  std::string val_file;
  std::string val_preset = "desk";
  val_cmd->add_option("--scenario", val_file, "Scenario JSON file (overrides --preset)");
  val_cmd->add_option("--preset", val_preset, "Built-in preset to inspect")
      ->capture_default_str();
  bool val_print = false;
  val_cmd->add_flag("--print", val_print, "Print the canonical scenario JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) {
      ScenarioConfig cfg = load_scenario(run_args.scenario_file, run_args.preset);
      apply_sub_scenario(cfg, run_sub);
      if (run_sigma >= 0) cfg.sensing.apc_sigma_pct = run_sigma;
      if (run_penetration >= 0) cfg.sensing.cv_penetration = run_penetration;
      if (!run_mode.empty()) cfg.sensing.mode = occupancy_mode_from_string(run_mode);
      ExperimentOptions opt = run_args.options();
      opt.log_decisions = run_decisions;
      opt.write_events = run_events;
      report(write_run_suite(cfg, opt));
    } else if (*matrix_cmd) {
      ScenarioConfig cfg = load_scenario(matrix_args.scenario_file, matrix_args.preset);
      report(write_matrix_suite(cfg, matrix_args.options()));
    } else if (*apc_cmd) {
      ScenarioConfig cfg = load_scenario(apc_args.scenario_file, apc_args.preset);
      report(write_apc_suite(cfg, apc_subs, apc_sigmas, apc_args.options()));
    } else if (*cv_cmd) {
      ScenarioConfig cfg = load_scenario(cv_args.scenario_file, cv_args.preset);
      apply_sub_scenario(cfg, cv_sub);
      report(write_cv_suite(cfg, cv_penetrations, cv_args.options()));
    } else if (*stab_cmd) {
      StabilityTrialConfig base;
      base.horizon_steps = stab_horizon;
      base.control_interval_steps = stab_interval;
      base.bus_bonus = stab_args.bus_bonus;
      report(write_stability_suite(base, kappas,
                                   parse_controllers(stab_args.controllers),
                                   stab_args.seeds, stab_args.out_dir,
                                   stab_args.workers));
    } else if (*val_cmd) {
      ScenarioConfig cfg = load_scenario(val_file, val_preset);
      cfg.validate();
      // With --print, stdout carries only the canonical JSON so the output
      // can be redirected straight into a scenario file.
      std::ostream& status = val_print ? std::cerr : std::cout;
      status << "ok name=" << cfg.name << " hash=" << to_hex(cfg.hash()) << "\n";
      if (val_print) std::cout << cfg.to_json_string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

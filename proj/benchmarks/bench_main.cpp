#include <benchmark/benchmark.h>

#include <vector>

#include "mpsim/controllers.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/routing.hpp"
#include "mpsim/runner.hpp"
#include "mpsim/scenario.hpp"
#include "mpsim/stability.hpp"

using namespace mpsim;

namespace {

// Arbitrary but fixed intersection snapshot: four phases over twelve
// movements with mixed queues, occupancies, and downstream load.
struct SelectFixture {
  Observation obs;
  IntersectionControlView view;

  SelectFixture() {
    Rng rng(7);
    view.phase_served = {{0, 1, 2, 3}, {4, 5}, {6, 7, 8, 9}, {10, 11}};
    for (int i = 0; i < 12; ++i) {
      view.saturation_vps.push_back(0.25 + 0.25 * static_cast<double>(rng.uniform_int(4)));
      MovementObservation mo;
      mo.queue = static_cast<int>(rng.uniform_int(8));
      for (int q = 0; q < mo.queue; ++q)
        mo.occupancy_sum += 1.0 + static_cast<double>(rng.uniform_int(5));
      if (mo.queue > 0 && rng.bernoulli(0.3)) mo.bus_count = 1;
      int branches = static_cast<int>(rng.uniform_int(3));
      for (int b = 0; b < branches; ++b)
        mo.downstream.push_back({static_cast<int>(rng.uniform_int(6)), 1.0 / branches});
      obs.movements.push_back(std::move(mo));
    }
  }
};

void BM_SelectPhase(benchmark::State& state) {
  static const SelectFixture fx;
  ControllerConfig cfg;
  cfg.kind = static_cast<ControllerKind>(state.range(0));
  int current = 0;
  for (auto _ : state) {
    PhaseDecision d = select_phase(fx.view, fx.obs, current, cfg);
    current = d.phase;
    benchmark::DoNotOptimize(d.pressures.data());
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(to_string(cfg.kind));
}
BENCHMARK(BM_SelectPhase)->Arg(0)->Arg(1)->Arg(2);

// Pure network-loading throughput: the calibrated desk population stepped
// under a fixed rotating phase plan (no controller, no sensing).
void BM_NetworkLoadingSteps(benchmark::State& state) {
  static const ScenarioConfig cfg = desk_preset();
  static const NetworkGraph net = build_grid(cfg.rows, cfg.cols);
  static Router router(net, cfg.routing.k, cfg.routing.theta);
  static const std::vector<Vehicle> vehicles = build_population(net, cfg, router, 1);

  const auto horizon = static_cast<long long>(cfg.horizon_s() / cfg.dynamics.dt_s);
  const int n_intersections = static_cast<int>(net.intersections().size());
  for (auto _ : state) {
    Simulation sim(net, cfg.dynamics, vehicles, 1);
    for (long long t = 0; t < horizon; ++t) {
      if (t % 30 == 0)
        for (int i = 0; i < n_intersections; ++i)
          sim.set_active_phase(i, static_cast<int>((t / 30) % 4));
      sim.step();
    }
    benchmark::DoNotOptimize(sim.exited());
  }
  state.SetItemsProcessed(state.iterations() * horizon);
}
BENCHMARK(BM_NetworkLoadingSteps)->Unit(benchmark::kMillisecond);

// Full pipeline: generation, routing, simulation, sensing, control, metrics.
void BM_DeskRun(benchmark::State& state) {
  RunRequest req;
  req.scenario = desk_preset();
  req.controller.kind = static_cast<ControllerKind>(state.range(0));
  req.seed = 1;
  for (auto _ : state) {
    RunOutput out = run_single(req);
    benchmark::DoNotOptimize(out.aggregates.ptt_pax_h);
  }
  state.SetItemsProcessed(state.iterations());
  state.SetLabel(to_string(req.controller.kind));
}
BENCHMARK(BM_DeskRun)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

// Simplex-grid feasibility on a phase structure with shared movements, which
// the closed form cannot handle. range(0) is the refinement exponent.
void BM_FeasibilityGrid(benchmark::State& state) {
  FeasibilityProblem p;
  p.demand = {0.30, 0.20, 0.25, 0.15, 0.20, 0.10};
  p.saturation = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  p.phases = {{{0, 1, 2}}, {{2, 3, 4}}, {{4, 5, 0}}};
  const double resolution = state.range(0) == 3 ? 1e-3 : 1e-4;
  for (auto _ : state) {
    FeasibilityResult r = is_feasible_grid(p, 1e-3, resolution);
    benchmark::DoNotOptimize(r.utilization);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FeasibilityGrid)->Arg(3)->Arg(4);

// Cold-cache alternative enumeration across the full grid diagonal.
void BM_RouterPaths(benchmark::State& state) {
  static const NetworkGraph net = build_grid(8, 8);
  const LinkId origin = net.centroids().front().source_link;
  const LinkId destination = net.centroids().back().sink_link;
  for (auto _ : state) {
    Router router(net, 3, 0.1);
    const std::vector<RoutePath>& alts = router.paths(origin, destination);
    benchmark::DoNotOptimize(alts.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RouterPaths);

// Warm-cache logit draws, the per-vehicle cost during population building.
void BM_RouteSample(benchmark::State& state) {
  static const NetworkGraph net = build_grid(8, 8);
  static Router router(net, 3, 0.1);
  const LinkId origin = net.centroids().front().source_link;
  const LinkId destination = net.centroids().back().sink_link;
  Rng rng(11);
  for (auto _ : state) {
    std::vector<LinkId> path = router.sample(origin, destination, rng);
    benchmark::DoNotOptimize(path.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RouteSample);

// Isolated-intersection stress trial at 80% of the feasibility boundary.
void BM_StabilityTrial(benchmark::State& state) {
  StabilityTrialConfig cfg;
  cfg.horizon_steps = 5000;
  cfg.kappa = 0.8;
  for (auto _ : state) {
    StabilityTrialOutcome o = run_stability_trial(cfg, 1);
    benchmark::DoNotOptimize(o.q4_mean);
  }
  state.SetItemsProcessed(state.iterations() * cfg.horizon_steps);
  state.SetLabel(to_string(cfg.controller));
}
BENCHMARK(BM_StabilityTrial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#pragma once

#include <cstdint>
#include <vector>

#include "mpsim/controllers.hpp"
#include "mpsim/metrics.hpp"
#include "mpsim/routing.hpp"
#include "mpsim/scenario.hpp"

namespace mpsim {

struct RunRequest {
  ScenarioConfig scenario;
  ControllerConfig controller;
  std::uint64_t seed = 1;
  bool log_decisions = false;
};

struct DecisionRecord {
  long long step = 0;
  int intersection = 0;
  int phase = 0;
  std::vector<double> pressures;
};

struct RunOutput {
  RunMetrics metrics;
  RunAggregates aggregates;
  long long cars = 0;
  long long buses = 0;
  std::vector<DecisionRecord> decisions;  // only when log_decisions
};

// Full population for one scenario and seed: private arrivals routed by
// logit sampling plus scheduled buses on their fixed alignments, merged in
// entry order with ids assigned, connectivity flags drawn, and bus error
// streams seeded. Identical for every controller under the same seed.
std::vector<Vehicle> build_population(const NetworkGraph& net, const ScenarioConfig& cfg,
                                      Router& router, std::uint64_t seed,
                                      long long* cars_out = nullptr,
                                      long long* buses_out = nullptr);

// Generation -> simulation -> aggregation for one (scenario, controller,
// seed) triple. Deterministic: equal requests yield equal outputs.
RunOutput run_single(const RunRequest& req);

}  // namespace mpsim

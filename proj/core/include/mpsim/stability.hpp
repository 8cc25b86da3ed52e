#pragma once

#include <cstdint>
#include <vector>

#include "mpsim/controllers.hpp"
#include "mpsim/demand.hpp"
#include "mpsim/network.hpp"

namespace mpsim {

// Binary phase activation: which movement indices a phase serves.
struct PhaseActivation {
  std::vector<int> served;
};

// Stationary demand vs. the service rates reachable by time-sharing phases.
// Feasible when some convex combination of phases covers every movement's
// demand. Rates are per step.
struct FeasibilityProblem {
  std::vector<double> demand;
  std::vector<double> saturation;
  std::vector<PhaseActivation> phases;

  void validate() const;
  // Every movement served by exactly one phase.
  bool exclusive() const;
};

struct FeasibilityResult {
  bool feasible = false;
  // Best achievable max over movements of demand / allocated service; the
  // demand is feasible exactly when this is <= 1.
  double utilization = 0;
  std::vector<double> witness;  // per-phase time shares at the optimum
  double slack = 0;             // unallocated share when feasible
};

// Exact expression for exclusive phase structures:
// sum over phases of max served demand/saturation.
FeasibilityResult is_feasible_closed_form(const FeasibilityProblem& p,
                                          double tolerance = 1e-3);

// Generic solver: nested grid refinement over the phase-share simplex down to
// `resolution`, minimizing the utilization.
FeasibilityResult is_feasible_grid(const FeasibilityProblem& p, double tolerance = 1e-3,
                                   double resolution = 1e-3);

// Dispatches to the closed form when the structure allows, else the grid.
FeasibilityResult is_feasible(const FeasibilityProblem& p, double tolerance = 1e-3);

// Smallest achievable total queue growth rate (veh/step): min over phase
// shares of sum_j max(0, demand_j - saturation_j * share_j). Zero for
// feasible demand.
double min_excess_rate(const FeasibilityProblem& p, double resolution = 1e-3);

// Demand scale factor that puts `direction` exactly on the feasibility
// boundary (utilization 1).
double boundary_scale(const FeasibilityProblem& direction);

enum class StabilityVerdict { kBounded = 0, kGrowing = 1, kIndeterminate = 2 };
const char* to_string(StabilityVerdict v);

struct StabilityTrialConfig {
  ControllerKind controller = ControllerKind::kOccMp;
  double bus_bonus = 1e6;
  double kappa = 0.8;            // demand scale relative to the boundary
  long long horizon_steps = 20000;  // at least 5000
  int control_interval_steps = 10;
  double dt_s = 1.0;
  LinkSpec link;                 // geometry/service template for the test intersection
  OccupancyDistribution occupancy;  // queue composition (matters for occmp)
};

struct StabilityTrialOutcome {
  StabilityVerdict verdict = StabilityVerdict::kIndeterminate;
  double q2_mean = 0;   // mean total queue, second quarter of the horizon
  double q4_mean = 0;   // mean total queue, last quarter
  double slope_veh_per_step = 0;       // least squares over the last half
  double excess_rate_veh_per_step = 0; // theoretical floor when infeasible
  double boundary_scale = 0;           // veh/step per movement at utilization 1
};

// Runs one isolated intersection (uniform demand over its twelve movements,
// Poisson arrivals, unbounded upstream storage) under the given controller.
// Verdict: bounded when the last-quarter mean queue stays below 1.5x the
// second-quarter mean; growing when it does not and the measured slope
// exceeds a quarter of the theoretical excess rate.
StabilityTrialOutcome run_stability_trial(const StabilityTrialConfig& cfg,
                                          std::uint64_t seed);

}  // namespace mpsim

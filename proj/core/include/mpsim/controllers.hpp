#pragma once

#include <string>
#include <vector>

#include "mpsim/network.hpp"

namespace mpsim {

// Queue state of one downstream movement (m, n) together with the turn
// fraction r(m, n) the controller believes in.
struct DownstreamEntry {
  int queue = 0;
  double turn_ratio = 0;
};

// What the controller can see of one incoming movement (l, m).
struct MovementObservation {
  int queue = 0;                 // visible vehicles waiting on (l, m)
  double occupancy_sum = 0;      // visible persons over those vehicles
  int bus_count = 0;             // visible buses among them
  std::vector<DownstreamEntry> downstream;  // one per movement leaving link m
};

// Snapshot of one intersection, aligned with Intersection::movements order.
struct Observation {
  bool is_isolated = false;
  std::vector<MovementObservation> movements;
};

// Static per-intersection context: phase composition and service rates.
struct IntersectionControlView {
  // phase -> positions into Observation::movements
  std::vector<std::vector<int>> phase_served;
  std::vector<double> saturation_vps;  // c(l, m) in veh/s, same order
};

IntersectionControlView make_control_view(const NetworkGraph& net,
                                          const Intersection& intersection);

enum class ControllerKind { kQmp = 0, kOccMp = 1, kRbMp = 2 };
const char* to_string(ControllerKind k);
ControllerKind controller_from_string(const std::string& s);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kQmp;
  double bus_bonus = 1e6;   // additive constant per bus-bearing movement
  bool clip_negative = false;  // queue-weight variant used only for equivalence checks
};

// Queue-difference weight: x(l,m) - sum_n x(m,n) * r(m,n). The downstream sum
// is dropped for isolated intersections. Unclipped unless `clip` is set.
double qmp_weight(const MovementObservation& mo, bool is_isolated, bool clip = false);

// Occupancy-scaled weight: mean visible occupancy of the queue times the
// non-negative part of the queue-difference weight; zero for empty queues.
double occmp_weight(const MovementObservation& mo, bool is_isolated);

// Unclipped queue-difference weight plus a large constant when at least one
// bus is visible in the queue.
double rbmp_weight(const MovementObservation& mo, bool is_isolated, double bus_bonus);

// Pressure of one phase: sum over served movements of weight * service rate.
double phase_pressure(const std::vector<double>& weights,
                      const std::vector<int>& served,
                      const std::vector<double>& saturation_vps);

struct PhaseDecision {
  int phase = 0;
  std::vector<double> pressures;
};

// Picks the max-pressure phase. Ties keep `current_phase` when it attains the
// maximum and otherwise fall to the lowest phase index.
PhaseDecision select_phase(const IntersectionControlView& view, const Observation& obs,
                           int current_phase, const ControllerConfig& cfg);

PhaseDecision select_phase_qmp(const IntersectionControlView& view, const Observation& obs,
                               int current_phase, bool clip = false);
PhaseDecision select_phase_occmp(const IntersectionControlView& view, const Observation& obs,
                                 int current_phase);
PhaseDecision select_phase_rbmp(const IntersectionControlView& view, const Observation& obs,
                                int current_phase, double bus_bonus = 1e6);

}  // namespace mpsim

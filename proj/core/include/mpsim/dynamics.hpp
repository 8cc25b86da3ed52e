#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "mpsim/network.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/vehicle.hpp"

namespace mpsim {

struct SimClock {
  long long step = 0;
  double dt_s = 1.0;
  int control_interval_steps = 10;

  double time_s() const { return static_cast<double>(step) * dt_s; }
  void validate() const {
    if (dt_s <= 0) throw ConfigError("clock.dt_s must be positive");
    if (control_interval_steps < 1)
      throw ConfigError("clock.control_interval_steps must be >= 1");
  }
};

struct DynamicsConfig {
  double dt_s = 1.0;
  int lost_time_steps = 0;          // all-red steps inserted on a phase change
  bool stochastic_saturation = false;
  double saturation_noise_amplitude = 0.2;  // uniform factor in [1-a, 1+a]
  bool unbounded_storage = false;   // disables entry blocking and spillback
};

// One step's integer discharge allowance plus the fractional remainder that
// carries over, so the long-run served rate equals the saturation flow.
struct QuotaResult {
  int granted = 0;
  double carry = 0;
};
QuotaResult service_quota(double saturation_flow_vph, double dt_s, double carry,
                          double noise_factor = 1.0);

// The movement the vehicle will leave `current` through, per its route.
// Throws RouteError when the route and topology disagree.
MovementId assign_to_movement(const NetworkGraph& net, const Vehicle& v, LinkId current);

struct MovementRuntime {
  std::deque<std::int32_t> queue;  // vehicle ids, FIFO
  long long occupancy_sum = 0;     // true persons over queued vehicles
  int bus_count = 0;
  double quota_carry = 0;
};

struct TraversingVehicle {
  long long ready_step;
  std::int32_t vehicle;
};

struct LinkRuntime {
  int on_link = 0;                          // traversing + queued
  std::deque<TraversingVehicle> traversing; // ready steps are non-decreasing
  std::deque<std::int32_t> entry_queue;     // source links: blocked arrivals
};

struct SignalRuntime {
  int active_phase = 0;
  int all_red_remaining = 0;
};

struct StepResult {
  int admitted = 0;
  std::vector<std::int32_t> discharged;  // crossed an intersection this step
  std::vector<std::int32_t> exited;      // subset of discharged
};

struct LedgerSample {
  double time_s = 0;
  long long entered = 0;
  long long exited = 0;
  long long accumulation = 0;  // entered - exited, includes blocked arrivals
};

// Discrete-time store-and-forward network loading. Vehicles traverse links at
// free flow, wait in per-movement point queues, and discharge at the
// saturation rate while served, capped by downstream storage. Signals are set
// externally between steps.
class Simulation {
 public:
  // `vehicles` must be sorted by entry_time_s (ties by id) and indexed by id.
  Simulation(const NetworkGraph& net, const DynamicsConfig& cfg,
             std::vector<Vehicle> vehicles, std::uint64_t master_seed);

  // Applies lost time when the phase actually changes.
  void set_active_phase(int intersection_idx, int phase);

  StepResult step();

  const NetworkGraph& net() const { return *net_; }
  const SimClock& clock() const { return clock_; }
  const std::vector<Vehicle>& vehicles() const { return vehicles_; }
  const MovementRuntime& movement_state(MovementId m) const {
    return movements_[static_cast<std::size_t>(m)];
  }
  const LinkRuntime& link_state(LinkId l) const {
    return links_[static_cast<std::size_t>(l)];
  }
  const SignalRuntime& signal_state(int intersection_idx) const {
    return signals_[static_cast<std::size_t>(intersection_idx)];
  }

  long long entered() const { return entered_; }
  long long exited() const { return exited_; }
  long long vehicles_inside() const { return entered_ - exited_; }
  // Total queued vehicles over all movements (point queues only).
  long long total_queue() const;
  const std::vector<LedgerSample>& ledger() const { return ledger_; }

  // Called once per bus each time it is discharged through an intersection.
  void set_crossing_hook(std::function<void(Vehicle&)> hook) { crossing_hook_ = std::move(hook); }

 private:
  int admit_arrivals();
  void settle_completions();
  void check_conservation();

  const NetworkGraph* net_;
  DynamicsConfig cfg_;
  SimClock clock_;
  std::vector<Vehicle> vehicles_;
  std::vector<MovementRuntime> movements_;
  std::vector<LinkRuntime> links_;
  std::vector<SignalRuntime> signals_;
  std::vector<int> travel_steps_;  // per link
  std::size_t next_arrival_ = 0;
  long long entered_ = 0;
  long long exited_ = 0;
  std::vector<LedgerSample> ledger_;
  long long sample_every_steps_ = 60;
  Rng saturation_rng_;
  std::function<void(Vehicle&)> crossing_hook_;

  // scratch buffers reused across steps
  std::vector<int> granted_;
  std::vector<int> allowed_;
};

}  // namespace mpsim

#pragma once

#include <cstdint>
#include <vector>

#include "mpsim/controllers.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/network.hpp"

namespace mpsim {

// How private-vehicle occupancy enters the controller's view.
enum class PrivateOccupancyMode { kExact = 0, kFixedAverage = 1 };
const char* to_string(PrivateOccupancyMode m);
PrivateOccupancyMode occupancy_mode_from_string(const std::string& s);

struct SensingConfig {
  PrivateOccupancyMode mode = PrivateOccupancyMode::kExact;
  double fixed_average_value = 1.5;   // persons per visible car in kFixedAverage
  double apc_sigma_pct = 0;           // bus reporting error, % of true occupancy per crossing
  double cv_penetration = 1.0;        // probability a car is visible at all
  bool buses_always_connected = true;

  void validate() const {
    if (fixed_average_value <= 0)
      throw ConfigError("sensing.fixed_average_value must be positive");
    if (apc_sigma_pct < 0) throw ConfigError("sensing.apc_sigma_pct must be >= 0");
    if (cv_penetration < 0 || cv_penetration > 1)
      throw ConfigError("sensing.cv_penetration must be in [0, 1]");
  }
};

// Decides a vehicle's connectivity flag once, at creation time, keyed by
// vehicle id so the flag pattern is independent of generation order.
bool draw_cv_flag(const Vehicle& v, const SensingConfig& cfg, std::uint64_t master_seed);

// Additive reporting error applied once per intersection crossing:
// eps ~ Normal(0, sigma% x true occupancy), reported clamped at zero.
// Keyed by (bus, crossing index) so the sequence does not depend on the
// controller under test.
void apc_on_crossing(Vehicle& bus, double sigma_pct);

// Controller-side snapshot of one intersection. Counts only visible vehicles;
// occupancy sums follow the configured mode (buses contribute their reported
// occupancy). Ground truth is never modified.
Observation observe(const NetworkGraph& net, const Simulation& sim, int intersection_idx,
                    const SensingConfig& cfg, const std::vector<double>& turn_ratios);

}  // namespace mpsim

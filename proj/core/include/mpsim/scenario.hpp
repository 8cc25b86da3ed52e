#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mpsim/demand.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/network.hpp"
#include "mpsim/sensing.hpp"

namespace mpsim {

// Bus line as written in a scenario file: centroid endpoints plus the named
// intersections the line must pass through, resolved against the grid at run
// time. Occupancy level and headway come from the scenario's level settings.
struct BusRoutePattern {
  std::string name;
  std::string entry_centroid;
  std::string exit_centroid;
  std::vector<std::string> via_nodes;
  bool high_occupancy = true;
};

struct DemandSettings {
  double target_total_veh = 0;   // expected entries over the variation window
  double ns_ew_ratio = 2.0;      // north/south origins vs. east/west origins
  std::vector<double> multipliers{0.6, 1.0, 1.4, 0.8};
  double interval_s = 0;         // duration of each multiplier interval
  double cooldown_s = 0;         // zero-demand flush tail
  OccupancyDistribution occupancy;
};

struct TransitSettings {
  bool enabled = true;
  double headway_s = 0;              // mean inter-departure, every route
  double high_occupancy_mean = 50;   // persons/bus on high-occupancy routes
  double low_occupancy_mean = 25;    // persons/bus on low-occupancy routes
  double capacity = 80;
  double spread_frac = 0.2;          // occupancy std as a fraction of the mean
  std::vector<BusRoutePattern> routes;
};

struct RoutingSettings {
  int k = 3;           // route alternatives per O-D pair
  double theta = 0.1;  // logit dispersion on free-flow time (1/s)
};

// Level values the eight-row sub-scenario matrix toggles between.
struct LevelTable {
  double demand_low_veh = 0;
  double demand_high_veh = 0;
  double headway_low_s = 0;    // low-frequency service
  double headway_high_s = 0;   // high-frequency service
  double pax_high_route_means[2] = {50, 25};  // {high-occ routes, low-occ routes}
  double pax_low_route_means[2] = {12, 3};
};

struct ScenarioConfig {
  std::string name = "scenario";
  int rows = 4;
  int cols = 4;
  LinkSpec link;
  double control_interval_s = 10;
  DynamicsConfig dynamics;
  DemandSettings demand;
  TransitSettings transit;
  RoutingSettings routing;
  SensingConfig sensing;
  LevelTable levels;

  double variation_window_s() const {
    return demand.interval_s * static_cast<double>(demand.multipliers.size());
  }
  double horizon_s() const { return variation_window_s() + demand.cooldown_s; }

  // Throws ConfigError naming the offending field path.
  void validate() const;

  std::string to_json_string(int indent = 2) const;
  static ScenarioConfig from_json_string(const std::string& text);

  // Stable content hash of the canonical serialization.
  std::uint64_t hash() const;
};

// 64-bit FNV-1a over bytes; used to fingerprint configs in output files.
std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

// Ten bus lines spanning the grid: four vertical (two columns, both ways) and
// six horizontal (three rows), seven marked high-occupancy and three low.
std::vector<BusRoutePattern> default_bus_routes(int rows, int cols);

// 4x4 grid, 45-minute demand window plus 15-minute cooldown; entry rates are
// the full preset's scaled by boundary-link count and window length, then
// raised 1.75x so the smaller grid reaches comparable saturation.
ScenarioConfig desk_preset();

// 8x8 grid, 2-hour demand window plus 1-hour cooldown.
ScenarioConfig full_preset();

// Applies one row of the factorial sub-scenario matrix to the config's
// demand target, bus headway, and per-class bus occupancy means.
void apply_levels(ScenarioConfig& cfg, const SubScenario& sub);

}  // namespace mpsim

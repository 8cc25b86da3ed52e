#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mpsim/network.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/vehicle.hpp"

namespace mpsim {

struct OccupancyDistribution {
  std::vector<int> values{1, 2, 3, 4, 5};
  std::vector<double> probs{0.7, 0.125, 0.1, 0.05, 0.025};

  void validate() const;
  double mean() const;
  int sample(Rng& rng) const;
};

struct DemandInterval {
  double duration_s = 0;
  double multiplier = 0;
};

struct OriginSpec {
  LinkId source_link = kNoLink;
  LinkId paired_sink = kNoLink;  // never chosen as this origin's destination
  double base_rate_vph = 0;      // at multiplier 1.0
  std::string centroid;
};

struct DemandProfile {
  std::vector<OriginSpec> origins;
  std::vector<DemandInterval> intervals;

  double expected_total() const;
  // The analytic expectation must land within tol_frac of the target.
  void validate(double target, double tol_frac = 0.01) const;
};

// Distributes `total_target` expected vehicles over the perimeter source
// links, with north/south origins `ns_ew_ratio` times as loaded as east/west
// ones, modulated by the piecewise-constant interval multipliers.
DemandProfile make_boundary_demand(const NetworkGraph& net, double total_target,
                                   double ns_ew_ratio,
                                   const std::vector<DemandInterval>& intervals);

struct PrivateArrival {
  double time_s = 0;
  LinkId origin = kNoLink;
  LinkId destination = kNoLink;
  int occupancy = 1;
};

// Poisson arrivals per origin (independent substreams), destinations uniform
// over the other perimeter zones, occupancies i.i.d. from `occ`.
std::vector<PrivateArrival> generate_private_arrivals(const NetworkGraph& net,
                                                      const DemandProfile& profile,
                                                      const OccupancyDistribution& occ,
                                                      std::uint64_t master_seed);

struct BusRouteSpec {
  std::string name;
  std::string entry_centroid;
  std::string exit_centroid;
  std::vector<NodeId> via;     // optional intermediate nodes
  double headway_s = 0;        // mean exponential inter-departure
  double occupancy_mean = 0;
  bool high_occupancy = true;  // classification used by scenario presets
};

struct BusTrip {
  double departure_s = 0;
  int route_index = -1;
  int occupancy = 1;
};

// Exponential headways per route over [0, service_duration_s); occupancies
// from a truncated normal with spread `spread_frac * mean`, clamped to
// [1, capacity] and rounded to whole persons.
std::vector<BusTrip> generate_bus_trips(const std::vector<BusRouteSpec>& routes,
                                        double service_duration_s, double capacity,
                                        double spread_frac, std::uint64_t master_seed);

// Long-run turn fractions implied by a run's route assignment, indexed by
// movement id; links that no route touches keep the network's defaults.
std::vector<double> empirical_turn_ratios(const NetworkGraph& net,
                                          const std::vector<Vehicle>& vehicles);

enum class Level { kLow = 0, kHigh = 1 };
const char* to_string(Level l);
Level level_from_string(const std::string& s);

struct SubScenario {
  Level private_demand = Level::kLow;
  Level bus_passenger_demand = Level::kLow;
  Level bus_frequency = Level::kLow;
};

// The eight factorial combinations, in canonical order (1..8).
std::array<SubScenario, 8> scenario_matrix();

}  // namespace mpsim

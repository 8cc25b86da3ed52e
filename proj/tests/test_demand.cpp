#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "mpsim/demand.hpp"
#include "mpsim/network.hpp"
#include "mpsim/rng.hpp"

using namespace mpsim;

TEST_CASE("the default occupancy table is a distribution with mean 1.575") {
  OccupancyDistribution occ;
  occ.validate();
  CHECK(occ.mean() == doctest::Approx(1.575));

  Rng rng(17);
  std::map<int, int> counts;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[occ.sample(rng)];
  CHECK(static_cast<double>(counts[1]) / n == doctest::Approx(0.7).epsilon(0.02));
  CHECK(static_cast<double>(counts[5]) / n == doctest::Approx(0.025).epsilon(0.1));

  OccupancyDistribution bad;
  bad.probs = {0.5, 0.125, 0.1, 0.05, 0.025};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.probs = {0.7, 0.125, 0.1, 0.05};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("boundary demand spreads the target with the axis ratio") {
  NetworkGraph net = build_grid(4, 4);
  std::vector<DemandInterval> intervals{{675, 0.6}, {675, 1.0}, {675, 1.4}, {675, 0.8}};
  DemandProfile profile = make_boundary_demand(net, 7560, 2.0, intervals);

  CHECK(profile.origins.size() == 16);
  CHECK(profile.expected_total() == doctest::Approx(7560));
  profile.validate(7560);

  // North/south origins carry twice the east/west rate.
  double ns_rate = -1;
  double ew_rate = -1;
  for (const OriginSpec& o : profile.origins) {
    if (o.centroid.front() == 'N' || o.centroid.front() == 'S')
      ns_rate = o.base_rate_vph;
    else
      ew_rate = o.base_rate_vph;
    CHECK(o.paired_sink != kNoLink);
  }
  CHECK(ns_rate == doctest::Approx(2.0 * ew_rate));

  CHECK_THROWS_AS(make_boundary_demand(net, 0, 2.0, intervals), ConfigError);
  CHECK_THROWS_AS(make_boundary_demand(net, 100, -1.0, intervals), ConfigError);
  std::vector<DemandInterval> dead{{675, 0.0}};
  CHECK_THROWS_AS(make_boundary_demand(net, 100, 2.0, dead), ConfigError);
}

TEST_CASE("private arrivals land on target with the configured structure") {
  NetworkGraph net = build_grid(4, 4);
  std::vector<DemandInterval> intervals{{675, 0.6}, {675, 1.0}, {675, 1.4}, {675, 0.8}};
  DemandProfile profile = make_boundary_demand(net, 7560, 2.0, intervals);
  OccupancyDistribution occ;

  std::vector<PrivateArrival> arrivals = generate_private_arrivals(net, profile, occ, 1);

  // Poisson total: within five sigma of the target.
  CHECK(std::abs(static_cast<double>(arrivals.size()) - 7560.0) < 5.0 * std::sqrt(7560.0));

  double window = 4 * 675.0;
  double prev = 0;
  long long ns = 0;
  long long ew = 0;
  double occ_sum = 0;
  for (const PrivateArrival& a : arrivals) {
    CHECK(a.time_s >= prev);  // globally sorted
    prev = a.time_s;
    CHECK(a.time_s < window);
    CHECK(a.occupancy >= 1);
    CHECK(a.occupancy <= 5);
    occ_sum += a.occupancy;
    const Link& origin = net.link(a.origin);
    CHECK(origin.is_source);
    CHECK(net.link(a.destination).is_sink);
    if (origin.heading == Heading::kNorth || origin.heading == Heading::kSouth)
      ++ns;
    else
      ++ew;
    // Nobody turns straight back into their own zone's exit.
    for (const Centroid& c : net.centroids())
      if (c.source_link == a.origin) CHECK(a.destination != c.sink_link);
  }
  CHECK(static_cast<double>(ns) / static_cast<double>(ew) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(occ_sum / static_cast<double>(arrivals.size()) == doctest::Approx(1.575).epsilon(0.02));

  // Same seed, same pattern; different seed, different pattern.
  std::vector<PrivateArrival> again = generate_private_arrivals(net, profile, occ, 1);
  REQUIRE(again.size() == arrivals.size());
  CHECK(again[0].time_s == arrivals[0].time_s);
  CHECK(again.back().destination == arrivals.back().destination);
  std::vector<PrivateArrival> other = generate_private_arrivals(net, profile, occ, 2);
  CHECK(other.size() != arrivals.size());
}

TEST_CASE("interval multipliers shape the arrival-rate profile") {
  NetworkGraph net = build_grid(2, 2);
  std::vector<DemandInterval> intervals{{1000, 0.5}, {1000, 1.5}};
  DemandProfile profile = make_boundary_demand(net, 4000, 1.0, intervals);
  OccupancyDistribution occ;
  std::vector<PrivateArrival> arrivals = generate_private_arrivals(net, profile, occ, 3);

  long long first = 0;
  long long second = 0;
  for (const PrivateArrival& a : arrivals) (a.time_s < 1000 ? first : second)++;
  // Expected 1000 vs 3000.
  CHECK(static_cast<double>(second) / static_cast<double>(first) ==
        doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("bus schedules follow their headways and occupancy levels") {
  std::vector<BusRouteSpec> routes(2);
  routes[0].name = "frequent";
  routes[0].headway_s = 120;
  routes[0].occupancy_mean = 50;
  routes[1].name = "sparse";
  routes[1].headway_s = 300;
  routes[1].occupancy_mean = 25;

  std::vector<BusTrip> trips = generate_bus_trips(routes, 7200, 80, 0.2, 5);

  long long frequent = 0;
  long long sparse = 0;
  double occ_frequent = 0;
  double prev = 0;
  for (const BusTrip& t : trips) {
    CHECK(t.departure_s >= prev);  // merged and sorted
    prev = t.departure_s;
    CHECK(t.departure_s < 7200);
    CHECK(t.occupancy >= 1);
    CHECK(t.occupancy <= 80);
    if (t.route_index == 0) {
      ++frequent;
      occ_frequent += t.occupancy;
    } else {
      ++sparse;
    }
  }
  // Expected counts 60 and 24 on exponential headways.
  CHECK(std::abs(static_cast<double>(frequent) - 60.0) <= 10.0);
  CHECK(std::abs(static_cast<double>(sparse) - 24.0) <= 7.0);
  // Occupancies spread around the route mean.
  CHECK(occ_frequent / static_cast<double>(frequent) == doctest::Approx(50.0).epsilon(0.04));

  // Validation catches broken route specs.
  std::vector<BusRouteSpec> bad = routes;
  bad[0].headway_s = 0;
  CHECK_THROWS_AS(generate_bus_trips(bad, 7200, 80, 0.2, 5), ConfigError);
  CHECK_THROWS_AS(generate_bus_trips(routes, 7200, 0, 0.2, 5), ConfigError);
}

TEST_CASE("realized turn fractions come from the routes actually driven") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  LinkId esink = net.centroid_by_name("E0").sink_link;
  MovementId through = net.find_movement(nsrc, ssink)->id;
  MovementId left = net.find_movement(nsrc, esink)->id;

  auto vehicle = [&](std::int32_t id, LinkId dest) {
    Vehicle v;
    v.id = id;
    v.route = {nsrc, dest};
    return v;
  };
  // Three vehicles through, one left.
  std::vector<Vehicle> fleet{vehicle(0, ssink), vehicle(1, ssink), vehicle(2, ssink),
                             vehicle(3, esink)};
  std::vector<double> ratios = empirical_turn_ratios(net, fleet);
  CHECK(ratios[static_cast<std::size_t>(through)] == doctest::Approx(0.75));
  CHECK(ratios[static_cast<std::size_t>(left)] == doctest::Approx(0.25));

  // Links no route touches keep the network's default estimates.
  LinkId wsrc = net.centroid_by_name("W0").source_link;
  for (MovementId m : net.movements_from(wsrc))
    CHECK(ratios[static_cast<std::size_t>(m)] == doctest::Approx(net.movement(m).turn_ratio));
}

TEST_CASE("the sub-scenario matrix enumerates all eight level combinations") {
  std::array<SubScenario, 8> matrix = scenario_matrix();
  std::set<std::string> seen;
  for (const SubScenario& s : matrix) {
    std::string key = std::string(to_string(s.private_demand)) + "/" +
                      to_string(s.bus_passenger_demand) + "/" + to_string(s.bus_frequency);
    seen.insert(key);
  }
  CHECK(seen.size() == 8);
  // The first row is the reference: light traffic, full buses, frequent
  // service. The last is its mirror.
  CHECK(matrix[0].private_demand == Level::kLow);
  CHECK(matrix[0].bus_passenger_demand == Level::kHigh);
  CHECK(matrix[0].bus_frequency == Level::kHigh);
  CHECK(matrix[7].private_demand == Level::kHigh);
  CHECK(matrix[7].bus_passenger_demand == Level::kLow);
  CHECK(matrix[7].bus_frequency == Level::kLow);

  CHECK(level_from_string("low") == Level::kLow);
  CHECK(level_from_string("high") == Level::kHigh);
  CHECK_THROWS_AS(level_from_string("medium"), ConfigError);
}

#include <algorithm>
#include <vector>

#include "doctest.h"
#include "mpsim/dynamics.hpp"
#include "mpsim/network.hpp"

using namespace mpsim;

namespace {

Vehicle make_vehicle(std::int32_t id, std::vector<LinkId> route, double entry_s,
                     int occupancy = 1, VehicleClass klass = VehicleClass::kCar) {
  Vehicle v;
  v.id = id;
  v.klass = klass;
  v.true_occupancy = occupancy;
  v.reported_occupancy = occupancy;
  v.route = std::move(route);
  v.entry_time_s = entry_s;
  return v;
}

// Phase of `it` serving the movement, -1 when absent.
int phase_serving(const NetworkGraph& net, const Intersection& it, MovementId m) {
  for (std::size_t p = 0; p < it.phases.size(); ++p) {
    const auto& served = it.phases[p].served;
    if (std::find(served.begin(), served.end(), m) != served.end())
      return static_cast<int>(p);
  }
  return -1;
}

}  // namespace

TEST_CASE("service quotas grant whole vehicles and carry the remainder") {
  // Half a vehicle per step: grants alternate 0, 1, 0, 1, ...
  double carry = 0;
  int total = 0;
  for (int i = 0; i < 10; ++i) {
    QuotaResult qr = service_quota(1800.0, 1.0, carry);
    carry = qr.carry;
    total += qr.granted;
    CHECK(qr.granted + qr.carry == doctest::Approx(0.5 + (i % 2 == 0 ? 0.0 : 0.5)));
  }
  CHECK(total == 5);
  CHECK(carry == doctest::Approx(0.0));

  // The noise factor scales the inflow, not the carried fraction.
  QuotaResult qr = service_quota(1800.0, 1.0, 0.25, 2.0);
  CHECK(qr.granted == 1);
  CHECK(qr.carry == doctest::Approx(0.25));

  CHECK_THROWS_AS(service_quota(0.0, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(service_quota(1800.0, 1.0, 0.0, -0.5), ConfigError);
}

TEST_CASE("movement assignment follows the route and rejects drift") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  REQUIRE(net.find_movement(nsrc, ssink) != nullptr);

  Vehicle v = make_vehicle(0, {nsrc, ssink}, 0);
  CHECK(assign_to_movement(net, v, nsrc) == net.find_movement(nsrc, ssink)->id);

  Vehicle off_route = make_vehicle(1, {nsrc, ssink}, 0);
  LinkId wsrc = net.centroid_by_name("W0").source_link;
  CHECK_THROWS_AS(assign_to_movement(net, off_route, wsrc), RouteError);

  Vehicle at_end = make_vehicle(2, {nsrc, ssink}, 0);
  at_end.route_pos = 1;
  CHECK_THROWS_AS(assign_to_movement(net, at_end, ssink), RouteError);
}

TEST_CASE("construction validates ids, ordering, and routes") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  DynamicsConfig cfg;

  // Ids must equal positions.
  CHECK_THROWS_AS(Simulation(net, cfg, {make_vehicle(5, {nsrc, ssink}, 0)}, 1),
                  InvariantViolation);
  // Entry times must be sorted.
  CHECK_THROWS_AS(Simulation(net, cfg,
                             {make_vehicle(0, {nsrc, ssink}, 10),
                              make_vehicle(1, {nsrc, ssink}, 5)},
                  1),
                  InvariantViolation);
  // Routes must run source to sink over adjacent links.
  CHECK_THROWS_AS(Simulation(net, cfg, {make_vehicle(0, {ssink, nsrc}, 0)}, 1), RouteError);
  LinkId esink = net.centroid_by_name("E0").sink_link;
  CHECK_THROWS_AS(Simulation(net, cfg, {make_vehicle(0, {nsrc, esink, ssink}, 0)}, 1),
                  RouteError);
}

TEST_CASE("vehicles traverse at free flow and discharge at the service rate") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  MovementId through = net.find_movement(nsrc, ssink)->id;
  const Intersection& it = net.intersections().front();

  std::vector<Vehicle> fleet;
  for (int i = 0; i < 3; ++i) fleet.push_back(make_vehicle(i, {nsrc, ssink}, 0, 1 + i));

  Simulation sim(net, {}, fleet, 7);
  sim.set_active_phase(0, phase_serving(net, it, through));

  // 200 m at 50 km/h is 15 whole steps; the head of the queue then waits for
  // the next whole service grant (0.5 veh/step), so exits land on even steps.
  for (int s = 0; s < 14; ++s) sim.step();
  CHECK(sim.movement_state(through).queue.empty());
  for (int s = 14; s < 16; ++s) sim.step();
  CHECK(sim.movement_state(through).queue.size() == 3);
  CHECK(sim.movement_state(through).occupancy_sum == 1 + 2 + 3);

  for (int s = 16; s < 24; ++s) sim.step();
  const std::vector<Vehicle>& done = sim.vehicles();
  CHECK(done[0].exit_time_s == doctest::Approx(18.0));
  CHECK(done[1].exit_time_s == doctest::Approx(20.0));
  CHECK(done[2].exit_time_s == doctest::Approx(22.0));
  CHECK(sim.exited() == 3);
  CHECK(sim.entered() == 3);
  CHECK(sim.movement_state(through).occupancy_sum == 0);
  CHECK(sim.total_queue() == 0);
}

TEST_CASE("queues serve in arrival order") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  MovementId through = net.find_movement(nsrc, ssink)->id;
  const Intersection& it = net.intersections().front();

  std::vector<Vehicle> fleet;
  for (int i = 0; i < 6; ++i)
    fleet.push_back(make_vehicle(i, {nsrc, ssink}, static_cast<double>(i)));

  Simulation sim(net, {}, fleet, 7);
  sim.set_active_phase(0, phase_serving(net, it, through));
  std::vector<std::int32_t> exit_order;
  for (int s = 0; s < 40; ++s) {
    StepResult r = sim.step();
    exit_order.insert(exit_order.end(), r.exited.begin(), r.exited.end());
  }
  REQUIRE(exit_order.size() == 6);
  for (std::size_t i = 0; i < exit_order.size(); ++i)
    CHECK(exit_order[i] == static_cast<std::int32_t>(i));
}

TEST_CASE("red approaches hold their queues and their service credit") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  MovementId through = net.find_movement(nsrc, ssink)->id;
  const Intersection& it = net.intersections().front();
  int green = phase_serving(net, it, through);
  int red = (green + 2) % static_cast<int>(it.phases.size());

  std::vector<Vehicle> fleet{make_vehicle(0, {nsrc, ssink}, 0)};
  Simulation sim(net, {}, fleet, 7);
  sim.set_active_phase(0, red);
  for (int s = 0; s < 30; ++s) sim.step();
  CHECK(sim.movement_state(through).queue.size() == 1);
  CHECK(sim.exited() == 0);

  sim.set_active_phase(0, green);
  for (int s = 0; s < 4; ++s) sim.step();
  CHECK(sim.exited() == 1);
}

TEST_CASE("phase changes insert the configured all-red time") {
  NetworkGraph net = build_grid(1, 1);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  MovementId through = net.find_movement(nsrc, ssink)->id;
  const Intersection& it = net.intersections().front();
  int green = phase_serving(net, it, through);

  DynamicsConfig cfg;
  cfg.lost_time_steps = 5;
  std::vector<Vehicle> fleet{make_vehicle(0, {nsrc, ssink}, 0)};
  Simulation sim(net, cfg, fleet, 7);

  // Every actual phase change pays the lost time.
  sim.set_active_phase(0, (green + 1) % static_cast<int>(it.phases.size()));
  CHECK(sim.signal_state(0).all_red_remaining == 5);
  sim.set_active_phase(0, green);
  CHECK(sim.signal_state(0).all_red_remaining == 5);
  // Re-asserting the active phase does not.
  sim.set_active_phase(0, green);
  CHECK(sim.signal_state(0).all_red_remaining == 5);

  for (int s = 0; s < 40; ++s) sim.step();
  // Five all-red steps shift the half-vehicle grant cadence by one step
  // relative to an uninterrupted green, which would discharge at t=18.
  CHECK(sim.exited() == 1);
  CHECK(sim.vehicles()[0].exit_time_s == doctest::Approx(17.0));
}

TEST_CASE("source storage blocks admission but arrivals still count as inside") {
  LinkSpec tight;
  tight.length_m = 14;
  tight.lanes = 1;  // storage for two vehicles, two-step traversal
  NetworkGraph net = build_grid(1, 1, tight);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  REQUIRE(net.link(nsrc).storage_capacity == 2);

  std::vector<Vehicle> fleet;
  for (int i = 0; i < 5; ++i) fleet.push_back(make_vehicle(i, {nsrc, ssink}, 0));

  // Hold a phase that never serves this approach.
  MovementId through = net.find_movement(nsrc, ssink)->id;
  const Intersection& it = net.intersections().front();
  int green = phase_serving(net, it, through);
  Simulation sim(net, {}, fleet, 7);
  sim.set_active_phase(0, (green + 1) % static_cast<int>(it.phases.size()));
  for (int s = 0; s < 60; ++s) sim.step();
  CHECK(sim.entered() == 5);
  CHECK(sim.exited() == 0);
  CHECK(sim.link_state(nsrc).on_link == 2);
  CHECK(sim.link_state(nsrc).entry_queue.size() == 3);
  REQUIRE(sim.ledger().size() == 1);
  CHECK(sim.ledger().front().accumulation == 5);

  // Unbounded storage admits everyone immediately.
  Simulation open(net, {.unbounded_storage = true}, fleet, 7);
  open.step();
  CHECK(open.link_state(nsrc).on_link == 5);
}

TEST_CASE("downstream storage caps discharges and spills back") {
  LinkSpec tight;
  tight.length_m = 14;
  tight.lanes = 1;
  NetworkGraph net = build_grid(1, 2, tight);

  LinkId wsrc = net.centroid_by_name("W0").source_link;
  LinkId esink = net.centroid_by_name("E0").sink_link;
  NodeId left = net.grid_node(0, 0);
  NodeId right = net.grid_node(0, 1);
  // The single eastbound internal link.
  LinkId middle = kNoLink;
  for (const Link& l : net.links())
    if (l.from == left && l.to == right) middle = l.id;
  REQUIRE(middle != kNoLink);

  std::vector<Vehicle> fleet;
  for (int i = 0; i < 5; ++i) fleet.push_back(make_vehicle(i, {wsrc, middle, esink}, 0));

  Simulation sim(net, {}, fleet, 7);
  // Green for the westbound approach at the left intersection; the right
  // intersection stays on a north-south phase, so the middle link fills up.
  const Intersection& left_it =
      net.intersections()[static_cast<std::size_t>(net.intersection_index(left))];
  MovementId entry_move = net.find_movement(wsrc, middle)->id;
  sim.set_active_phase(net.intersection_index(left), phase_serving(net, left_it, entry_move));

  for (int s = 0; s < 80; ++s) {
    sim.step();
    CHECK(sim.link_state(middle).on_link <= net.link(middle).storage_capacity);
  }
  // Two vehicles fit downstream, the rest are held upstream; nobody exits.
  CHECK(sim.link_state(middle).on_link == 2);
  CHECK(sim.exited() == 0);
  CHECK(sim.entered() == 5);

  // Releasing the right intersection drains everything.
  const Intersection& right_it =
      net.intersections()[static_cast<std::size_t>(net.intersection_index(right))];
  MovementId exit_move = net.find_movement(middle, esink)->id;
  sim.set_active_phase(net.intersection_index(right), phase_serving(net, right_it, exit_move));
  for (int s = 0; s < 80; ++s) sim.step();
  CHECK(sim.exited() == 5);
  CHECK(sim.total_queue() == 0);
}

TEST_CASE("the ledger balances entries, exits, and vehicles inside") {
  NetworkGraph net = build_grid(2, 2);
  LinkId nsrc = net.centroid_by_name("N0").source_link;
  LinkId ssink = net.centroid_by_name("S0").sink_link;
  NodeId top = net.grid_node(0, 0);
  NodeId bottom = net.grid_node(1, 0);
  LinkId mid = kNoLink;
  for (const Link& l : net.links())
    if (l.from == top && l.to == bottom) mid = l.id;
  REQUIRE(mid != kNoLink);

  std::vector<Vehicle> fleet;
  for (int i = 0; i < 40; ++i)
    fleet.push_back(make_vehicle(i, {nsrc, mid, ssink}, 3.0 * i));

  Simulation sim(net, {}, fleet, 7);
  for (const Intersection& it : net.intersections()) {
    int idx = net.intersection_index(it.node);
    MovementId serve = it.movements.front();
    if (it.node == top) serve = net.find_movement(nsrc, mid)->id;
    if (it.node == bottom) serve = net.find_movement(mid, ssink)->id;
    sim.set_active_phase(idx, phase_serving(net, it, serve));
  }
  for (int s = 0; s < 360; ++s) sim.step();

  REQUIRE(sim.ledger().size() == 6);
  for (const LedgerSample& sample : sim.ledger())
    CHECK(sample.accumulation == sample.entered - sample.exited);
  CHECK(sim.entered() == 40);
  CHECK(sim.exited() == 40);
  CHECK(sim.ledger().back().accumulation == 0);
}

TEST_CASE("the crossing hook fires once per intersection passed") {
  NetworkGraph net = build_grid(1, 2);
  LinkId wsrc = net.centroid_by_name("W0").source_link;
  LinkId esink = net.centroid_by_name("E0").sink_link;
  NodeId left = net.grid_node(0, 0);
  NodeId right = net.grid_node(0, 1);
  LinkId middle = kNoLink;
  for (const Link& l : net.links())
    if (l.from == left && l.to == right) middle = l.id;

  std::vector<Vehicle> fleet{
      make_vehicle(0, {wsrc, middle, esink}, 0, 40, VehicleClass::kBus)};
  Simulation sim(net, {}, fleet, 7);
  for (const Intersection& it : net.intersections()) {
    int idx = net.intersection_index(it.node);
    MovementId serve = it.node == left ? net.find_movement(wsrc, middle)->id
                                       : net.find_movement(middle, esink)->id;
    sim.set_active_phase(idx, phase_serving(net, it, serve));
  }

  int calls = 0;
  sim.set_crossing_hook([&](Vehicle& v) {
    ++calls;
    CHECK(v.klass == VehicleClass::kBus);
    CHECK(v.intersection_crossings == calls);
  });
  for (int s = 0; s < 80; ++s) sim.step();
  CHECK(sim.exited() == 1);
  CHECK(calls == 2);
}

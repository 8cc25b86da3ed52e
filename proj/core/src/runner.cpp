#include "mpsim/runner.hpp"

#include <algorithm>
#include <cmath>

#include "mpsim/demand.hpp"
#include "mpsim/dynamics.hpp"
#include "mpsim/sensing.hpp"

namespace mpsim {

namespace {

NodeId node_by_name(const NetworkGraph& net, const std::string& name) {
  for (const NodeInfo& n : net.nodes())
    if (n.name == name) return n.id;
  throw ConfigError("unknown node '" + name + "'");
}

std::vector<DemandInterval> demand_intervals(const DemandSettings& d) {
  std::vector<DemandInterval> intervals;
  intervals.reserve(d.multipliers.size());
  for (double m : d.multipliers) intervals.push_back({d.interval_s, m});
  return intervals;
}

}  // namespace

std::vector<Vehicle> build_population(const NetworkGraph& net, const ScenarioConfig& cfg,
                                      Router& router, std::uint64_t seed,
                                      long long* cars_out, long long* buses_out) {
  DemandProfile profile = make_boundary_demand(net, cfg.demand.target_total_veh,
                                               cfg.demand.ns_ew_ratio,
                                               demand_intervals(cfg.demand));
  std::vector<PrivateArrival> arrivals =
      generate_private_arrivals(net, profile, cfg.demand.occupancy, seed);

  std::vector<Vehicle> population;
  population.reserve(arrivals.size());
  Rng route_rng(substream_seed(seed, Stream::kRouting));
  for (const PrivateArrival& a : arrivals) {
    Vehicle v;
    v.klass = VehicleClass::kCar;
    v.true_occupancy = a.occupancy;
    v.reported_occupancy = a.occupancy;
    v.route = router.sample(a.origin, a.destination, route_rng);
    v.entry_time_s = a.time_s;
    population.push_back(std::move(v));
  }

  long long buses = 0;
  if (cfg.transit.enabled) {
    std::vector<BusRouteSpec> specs;
    std::vector<std::vector<LinkId>> alignments;
    specs.reserve(cfg.transit.routes.size());
    for (const BusRoutePattern& p : cfg.transit.routes) {
      BusRouteSpec s;
      s.name = p.name;
      s.entry_centroid = p.entry_centroid;
      s.exit_centroid = p.exit_centroid;
      for (const std::string& n : p.via_nodes) s.via.push_back(node_by_name(net, n));
      s.headway_s = cfg.transit.headway_s;
      s.occupancy_mean =
          p.high_occupancy ? cfg.transit.high_occupancy_mean : cfg.transit.low_occupancy_mean;
      s.high_occupancy = p.high_occupancy;
      alignments.push_back(router.shortest_via(net.centroid_by_name(p.entry_centroid).source_link,
                                               s.via,
                                               net.centroid_by_name(p.exit_centroid).sink_link));
      specs.push_back(std::move(s));
    }
    std::vector<BusTrip> trips =
        generate_bus_trips(specs, cfg.variation_window_s(), cfg.transit.capacity,
                           cfg.transit.spread_frac, seed);
    for (std::size_t i = 0; i < trips.size(); ++i) {
      Vehicle v;
      v.klass = VehicleClass::kBus;
      v.true_occupancy = trips[i].occupancy;
      v.reported_occupancy = trips[i].occupancy;
      v.route = alignments[static_cast<std::size_t>(trips[i].route_index)];
      v.entry_time_s = trips[i].departure_s;
      v.apc_seed = substream_seed(seed, Stream::kApcNoise, i);
      population.push_back(std::move(v));
    }
    buses = static_cast<long long>(trips.size());
  }

  std::stable_sort(population.begin(), population.end(),
                   [](const Vehicle& a, const Vehicle& b) {
                     return a.entry_time_s < b.entry_time_s;
                   });
  for (std::size_t i = 0; i < population.size(); ++i) {
    Vehicle& v = population[i];
    v.id = static_cast<std::int32_t>(i);
    v.connected = draw_cv_flag(v, cfg.sensing, seed);
  }

  if (cars_out) *cars_out = static_cast<long long>(population.size()) - buses;
  if (buses_out) *buses_out = buses;
  return population;
}

RunOutput run_single(const RunRequest& req) {
  const ScenarioConfig& cfg = req.scenario;
  cfg.validate();

  NetworkGraph net = build_grid(cfg.rows, cfg.cols, cfg.link);
  Router router(net, cfg.routing.k, cfg.routing.theta);

  RunOutput out;
  std::vector<Vehicle> population =
      build_population(net, cfg, router, req.seed, &out.cars, &out.buses);
  std::vector<double> turn_ratios = empirical_turn_ratios(net, population);

  Simulation sim(net, cfg.dynamics, std::move(population), req.seed);
  if (cfg.sensing.apc_sigma_pct > 0) {
    const double sigma = cfg.sensing.apc_sigma_pct;
    sim.set_crossing_hook([sigma](Vehicle& bus) { apc_on_crossing(bus, sigma); });
  }

  std::vector<IntersectionControlView> views;
  views.reserve(net.intersections().size());
  for (const Intersection& inter : net.intersections())
    views.push_back(make_control_view(net, inter));

  const long long steps = std::llround(cfg.horizon_s() / cfg.dynamics.dt_s);
  const long long interval = std::llround(cfg.control_interval_s / cfg.dynamics.dt_s);
  const int n_inter = static_cast<int>(net.intersections().size());
  std::vector<int> pending(static_cast<std::size_t>(n_inter), -1);
  std::vector<int> current(static_cast<std::size_t>(n_inter), 0);

  for (long long t = 0; t < steps; ++t) {
    for (int i = 0; i < n_inter; ++i) {
      if (pending[static_cast<std::size_t>(i)] >= 0) {
        sim.set_active_phase(i, pending[static_cast<std::size_t>(i)]);
        pending[static_cast<std::size_t>(i)] = -1;
      }
    }
    if (t % interval == 0) {
      for (int i = 0; i < n_inter; ++i) {
        Observation obs = observe(net, sim, i, cfg.sensing, turn_ratios);
        PhaseDecision d = select_phase(views[static_cast<std::size_t>(i)], obs,
                                       current[static_cast<std::size_t>(i)], req.controller);
        pending[static_cast<std::size_t>(i)] = d.phase;
        current[static_cast<std::size_t>(i)] = d.phase;
        if (req.log_decisions)
          out.decisions.push_back({t, i, d.phase, std::move(d.pressures)});
      }
    }
    sim.step();
  }

  out.metrics.horizon_s = cfg.horizon_s();
  out.metrics.accumulation = sim.ledger();
  out.metrics.ledger.reserve(sim.vehicles().size());
  for (const Vehicle& v : sim.vehicles()) {
    VehicleRecord rec;
    rec.klass = v.klass;
    rec.occupancy = v.true_occupancy;
    rec.entry_s = v.entry_time_s;
    rec.exit_s = v.exit_time_s;
    rec.censored = v.exit_time_s < 0;
    out.metrics.ledger.push_back(rec);
  }
  out.aggregates = aggregate(out.metrics);
  return out;
}

}  // namespace mpsim

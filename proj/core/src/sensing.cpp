#include "mpsim/sensing.hpp"

#include <algorithm>

#include "mpsim/rng.hpp"

namespace mpsim {

const char* to_string(PrivateOccupancyMode m) {
  return m == PrivateOccupancyMode::kExact ? "exact" : "fixed_average";
}

PrivateOccupancyMode occupancy_mode_from_string(const std::string& s) {
  if (s == "exact") return PrivateOccupancyMode::kExact;
  if (s == "fixed_average") return PrivateOccupancyMode::kFixedAverage;
  throw ConfigError("sensing.mode: expected exact|fixed_average, got '" + s + "'");
}

bool draw_cv_flag(const Vehicle& v, const SensingConfig& cfg, std::uint64_t master_seed) {
  if (v.klass == VehicleClass::kBus) return cfg.buses_always_connected;
  return Rng::bernoulli_at(
      substream_seed(master_seed, Stream::kCvFlags, static_cast<std::uint64_t>(v.id)),
      cfg.cv_penetration);
}

void apc_on_crossing(Vehicle& bus, double sigma_pct) {
  if (bus.klass != VehicleClass::kBus) return;
  if (sigma_pct <= 0) return;
  double sigma = sigma_pct / 100.0 * static_cast<double>(bus.true_occupancy);
  double eps = Rng::normal_at(
      substream_seed(bus.apc_seed, Stream::kApcNoise,
                     static_cast<std::uint64_t>(bus.intersection_crossings)),
      0.0, sigma);
  bus.reported_occupancy = std::max(0.0, bus.reported_occupancy + eps);
}

Observation observe(const NetworkGraph& net, const Simulation& sim, int intersection_idx,
                    const SensingConfig& cfg, const std::vector<double>& turn_ratios) {
  const Intersection& it =
      net.intersections().at(static_cast<std::size_t>(intersection_idx));
  const std::vector<Vehicle>& vehicles = sim.vehicles();

  auto visible = [&](std::int32_t vid) {
    const Vehicle& v = vehicles[static_cast<std::size_t>(vid)];
    return v.connected;
  };

  Observation obs;
  obs.is_isolated = it.is_isolated;
  obs.movements.reserve(it.movements.size());

  for (MovementId mid : it.movements) {
    const Movement& m = net.movement(mid);
    const MovementRuntime& mr = sim.movement_state(mid);
    MovementObservation mo;
    for (std::int32_t vid : mr.queue) {
      if (!visible(vid)) continue;
      const Vehicle& v = vehicles[static_cast<std::size_t>(vid)];
      ++mo.queue;
      if (v.klass == VehicleClass::kBus) {
        ++mo.bus_count;
        mo.occupancy_sum += v.reported_occupancy;
      } else if (cfg.mode == PrivateOccupancyMode::kFixedAverage) {
        mo.occupancy_sum += cfg.fixed_average_value;
      } else {
        mo.occupancy_sum += static_cast<double>(v.true_occupancy);
      }
    }
    // Downstream movements (m, n) of the exit link, skipped entirely for
    // isolated intersections and for exits into sinks.
    if (!it.is_isolated && !net.link(m.downstream).is_sink) {
      for (MovementId nid : net.movements_from(m.downstream)) {
        const MovementRuntime& nr = sim.movement_state(nid);
        DownstreamEntry entry;
        for (std::int32_t vid : nr.queue)
          if (visible(vid)) ++entry.queue;
        entry.turn_ratio = turn_ratios[static_cast<std::size_t>(nid)];
        mo.downstream.push_back(entry);
      }
    }
    obs.movements.push_back(std::move(mo));
  }
  return obs;
}

}  // namespace mpsim

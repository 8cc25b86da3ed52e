#include "mpsim/demand.hpp"

#include <algorithm>
#include <cmath>

namespace mpsim {

void OccupancyDistribution::validate() const {
  if (values.empty() || values.size() != probs.size())
    throw ConfigError("occupancy_distribution: values and probs must match and be non-empty");
  double sum = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 1) throw ConfigError("occupancy_distribution: occupancies must be >= 1");
    if (probs[i] < 0) throw ConfigError("occupancy_distribution: probabilities must be >= 0");
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("occupancy_distribution: probabilities sum to " + std::to_string(sum));
}

double OccupancyDistribution::mean() const {
  double m = 0;
  for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
  return m;
}

int OccupancyDistribution::sample(Rng& rng) const {
  return values[rng.discrete(probs)];
}

double DemandProfile::expected_total() const {
  double exposure_s = 0;  // multiplier-weighted seconds
  for (const DemandInterval& iv : intervals) exposure_s += iv.duration_s * iv.multiplier;
  double total = 0;
  for (const OriginSpec& o : origins) total += o.base_rate_vph / 3600.0 * exposure_s;
  return total;
}

void DemandProfile::validate(double target, double tol_frac) const {
  if (origins.empty()) throw ConfigError("demand: no origins");
  for (const DemandInterval& iv : intervals) {
    if (iv.duration_s <= 0) throw ConfigError("demand: interval durations must be positive");
    if (iv.multiplier < 0) throw ConfigError("demand: multipliers must be >= 0");
  }
  for (const OriginSpec& o : origins)
    if (o.base_rate_vph < 0) throw ConfigError("demand: origin rates must be >= 0");
  double expect = expected_total();
  if (target > 0 && std::abs(expect - target) > tol_frac * target)
    throw ConfigError("demand: expected total " + std::to_string(expect) +
                      " misses target " + std::to_string(target));
}

DemandProfile make_boundary_demand(const NetworkGraph& net, double total_target,
                                   double ns_ew_ratio,
                                   const std::vector<DemandInterval>& intervals) {
  if (total_target <= 0) throw ConfigError("demand.total_target must be positive");
  if (ns_ew_ratio <= 0) throw ConfigError("demand.ns_ew_ratio must be positive");

  double exposure_s = 0;
  for (const DemandInterval& iv : intervals) exposure_s += iv.duration_s * iv.multiplier;
  if (exposure_s <= 0) throw ConfigError("demand: intervals carry no demand");

  DemandProfile profile;
  profile.intervals = intervals;
  double weight_sum = 0;
  for (const Centroid& c : net.centroids()) {
    // North/south boundary zones launch north-south traffic.
    bool ns = c.name.front() == 'N' || c.name.front() == 'S';
    weight_sum += ns ? ns_ew_ratio : 1.0;
  }
  double unit_rate_vph = total_target * 3600.0 / (exposure_s * weight_sum);
  for (const Centroid& c : net.centroids()) {
    bool ns = c.name.front() == 'N' || c.name.front() == 'S';
    OriginSpec o;
    o.source_link = c.source_link;
    o.paired_sink = c.sink_link;
    o.base_rate_vph = unit_rate_vph * (ns ? ns_ew_ratio : 1.0);
    o.centroid = c.name;
    profile.origins.push_back(o);
  }
  profile.validate(total_target);
  return profile;
}

std::vector<PrivateArrival> generate_private_arrivals(const NetworkGraph& net,
                                                      const DemandProfile& profile,
                                                      const OccupancyDistribution& occ,
                                                      std::uint64_t master_seed) {
  occ.validate();
  std::vector<LinkId> sinks = net.sink_links();

  std::vector<PrivateArrival> out;
  for (std::size_t oi = 0; oi < profile.origins.size(); ++oi) {
    const OriginSpec& origin = profile.origins[oi];
    Rng times(substream_seed(master_seed, Stream::kDemand, oi));
    Rng dest(substream_seed(master_seed, Stream::kDestination, oi));
    Rng occupancy(substream_seed(master_seed, Stream::kOccupancy, oi));

    std::vector<LinkId> choices;
    for (LinkId s : sinks)
      if (s != origin.paired_sink) choices.push_back(s);
    if (choices.empty()) throw ConfigError("demand: origin has no reachable destination");

    double t0 = 0;
    for (const DemandInterval& iv : profile.intervals) {
      double t1 = t0 + iv.duration_s;
      double rate = origin.base_rate_vph / 3600.0 * iv.multiplier;  // veh/s
      if (rate > 0) {
        double t = t0 + times.exponential(1.0 / rate);
        while (t < t1) {
          PrivateArrival a;
          a.time_s = t;
          a.origin = origin.source_link;
          a.destination = choices[dest.uniform_int(choices.size())];
          a.occupancy = occ.sample(occupancy);
          out.push_back(a);
          t += times.exponential(1.0 / rate);
        }
      }
      t0 = t1;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const PrivateArrival& a, const PrivateArrival& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    return a.origin < b.origin;
  });
  return out;
}

std::vector<BusTrip> generate_bus_trips(const std::vector<BusRouteSpec>& routes,
                                        double service_duration_s, double capacity,
                                        double spread_frac, std::uint64_t master_seed) {
  if (capacity < 1) throw ConfigError("transit.capacity must be >= 1");
  if (spread_frac < 0) throw ConfigError("transit.occupancy_spread_frac must be >= 0");

  std::vector<BusTrip> out;
  for (std::size_t ri = 0; ri < routes.size(); ++ri) {
    const BusRouteSpec& r = routes[ri];
    if (r.headway_s <= 0) throw ConfigError("transit.route " + r.name + ": headway must be positive");
    if (r.occupancy_mean < 1)
      throw ConfigError("transit.route " + r.name + ": occupancy mean must be >= 1");
    Rng sched(substream_seed(master_seed, Stream::kBusSchedule, ri));
    Rng pax(substream_seed(master_seed, Stream::kBusOccupancy, ri));
    double t = sched.exponential(r.headway_s);
    while (t < service_duration_s) {
      BusTrip trip;
      trip.departure_s = t;
      trip.route_index = static_cast<int>(ri);
      double v = pax.truncated_normal(r.occupancy_mean, spread_frac * r.occupancy_mean, 1.0,
                                      capacity);
      trip.occupancy = std::max(1, static_cast<int>(std::lround(v)));
      out.push_back(trip);
      t += sched.exponential(r.headway_s);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const BusTrip& a, const BusTrip& b) {
    if (a.departure_s != b.departure_s) return a.departure_s < b.departure_s;
    return a.route_index < b.route_index;
  });
  return out;
}

std::vector<double> empirical_turn_ratios(const NetworkGraph& net,
                                          const std::vector<Vehicle>& vehicles) {
  std::vector<long long> count(net.movements().size(), 0);
  std::vector<long long> through_link(net.links().size(), 0);
  for (const Vehicle& v : vehicles) {
    for (std::size_t i = 0; i + 1 < v.route.size(); ++i) {
      const Movement* m = net.find_movement(v.route[i], v.route[i + 1]);
      if (m == nullptr)
        throw RouteError("turn ratios: route with non-adjacent links on vehicle " +
                         std::to_string(v.id));
      ++count[static_cast<std::size_t>(m->id)];
      ++through_link[static_cast<std::size_t>(v.route[i])];
    }
  }
  std::vector<double> ratio(net.movements().size(), 0);
  for (const Movement& m : net.movements()) {
    long long denom = through_link[static_cast<std::size_t>(m.upstream)];
    ratio[static_cast<std::size_t>(m.id)] =
        denom > 0 ? static_cast<double>(count[static_cast<std::size_t>(m.id)]) /
                        static_cast<double>(denom)
                  : m.turn_ratio;
  }
  return ratio;
}

const char* to_string(Level l) { return l == Level::kLow ? "low" : "high"; }

Level level_from_string(const std::string& s) {
  if (s == "low") return Level::kLow;
  if (s == "high") return Level::kHigh;
  throw ConfigError("level: expected low|high, got '" + s + "'");
}

std::array<SubScenario, 8> scenario_matrix() {
  using L = Level;
  return {{
      {L::kLow, L::kHigh, L::kHigh},   // 1
      {L::kLow, L::kHigh, L::kLow},    // 2
      {L::kLow, L::kLow, L::kHigh},    // 3
      {L::kLow, L::kLow, L::kLow},     // 4
      {L::kHigh, L::kHigh, L::kHigh},  // 5
      {L::kHigh, L::kHigh, L::kLow},   // 6
      {L::kHigh, L::kLow, L::kHigh},   // 7
      {L::kHigh, L::kLow, L::kLow},    // 8
  }};
}

}  // namespace mpsim

#include "mpsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mpsim {

QuotaResult service_quota(double saturation_flow_vph, double dt_s, double carry,
                          double noise_factor) {
  if (saturation_flow_vph <= 0 || dt_s <= 0)
    throw ConfigError("service_quota: saturation flow and dt must be positive");
  if (noise_factor < 0)
    throw ConfigError("service_quota: noise factor must be non-negative");
  double avail = carry + saturation_flow_vph / 3600.0 * dt_s * noise_factor;
  int granted = static_cast<int>(std::floor(avail + 1e-12));
  return {granted, avail - granted};
}

MovementId assign_to_movement(const NetworkGraph& net, const Vehicle& v, LinkId current) {
  if (v.route_pos < 0 || v.route_pos >= static_cast<int>(v.route.size()))
    throw RouteError("assign_to_movement: route position out of range for vehicle " +
                     std::to_string(v.id));
  if (v.route[static_cast<std::size_t>(v.route_pos)] != current)
    throw RouteError("assign_to_movement: vehicle " + std::to_string(v.id) +
                     " is not on its route link");
  if (v.route_pos + 1 >= static_cast<int>(v.route.size()))
    throw RouteError("assign_to_movement: vehicle " + std::to_string(v.id) +
                     " has no next link");
  LinkId next = v.route[static_cast<std::size_t>(v.route_pos) + 1];
  const Movement* m = net.find_movement(current, next);
  if (m == nullptr)
    throw RouteError("assign_to_movement: no movement " +
                     net.link(current).name + " -> " + net.link(next).name);
  return m->id;
}

Simulation::Simulation(const NetworkGraph& net, const DynamicsConfig& cfg,
                       std::vector<Vehicle> vehicles, std::uint64_t master_seed)
    : net_(&net),
      cfg_(cfg),
      vehicles_(std::move(vehicles)),
      saturation_rng_(substream_seed(master_seed, Stream::kSaturationNoise)) {
  clock_.dt_s = cfg.dt_s;
  clock_.validate();
  if (cfg_.lost_time_steps < 0)
    throw ConfigError("dynamics.lost_time_steps must be non-negative");
  if (cfg_.stochastic_saturation &&
      (cfg_.saturation_noise_amplitude < 0 || cfg_.saturation_noise_amplitude >= 1))
    throw ConfigError("dynamics.saturation_noise_amplitude must be in [0, 1)");

  movements_.assign(net.movements().size(), {});
  links_.assign(net.links().size(), {});
  signals_.assign(net.intersections().size(), {});
  granted_.assign(net.movements().size(), 0);
  allowed_.assign(net.movements().size(), 0);

  travel_steps_.reserve(net.links().size());
  for (const Link& l : net.links()) travel_steps_.push_back(l.travel_steps(cfg_.dt_s));

  sample_every_steps_ = std::max<long long>(1, std::llround(60.0 / cfg_.dt_s));

  double prev = -1;
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    const Vehicle& v = vehicles_[i];
    if (v.id != static_cast<std::int32_t>(i))
      throw InvariantViolation("simulation: vehicle ids must equal their index");
    if (v.entry_time_s < prev)
      throw InvariantViolation("simulation: vehicles must be sorted by entry time");
    prev = v.entry_time_s;
    if (v.route.size() < 2 || !net.link(v.route.front()).is_source ||
        !net.link(v.route.back()).is_sink)
      throw RouteError("simulation: vehicle " + std::to_string(v.id) +
                       " route must run source -> sink");
    for (std::size_t k = 0; k + 1 < v.route.size(); ++k)
      if (net.find_movement(v.route[k], v.route[k + 1]) == nullptr)
        throw RouteError("simulation: vehicle " + std::to_string(v.id) +
                         " route has non-adjacent links");
    if (v.true_occupancy < 1)
      throw InvariantViolation("simulation: occupancy must be at least 1");
  }
}

void Simulation::set_active_phase(int intersection_idx, int phase) {
  const Intersection& it = net_->intersections().at(static_cast<std::size_t>(intersection_idx));
  if (phase < 0 || phase >= static_cast<int>(it.phases.size()))
    throw ConfigError("set_active_phase: phase index out of range");
  SignalRuntime& sig = signals_[static_cast<std::size_t>(intersection_idx)];
  if (sig.active_phase != phase) {
    sig.active_phase = phase;
    sig.all_red_remaining = cfg_.lost_time_steps;
  }
}

int Simulation::admit_arrivals() {
  int admitted = 0;
  const double window_end = (static_cast<double>(clock_.step) + 1.0) * clock_.dt_s;
  while (next_arrival_ < vehicles_.size() &&
         vehicles_[next_arrival_].entry_time_s < window_end) {
    const Vehicle& v = vehicles_[next_arrival_];
    links_[static_cast<std::size_t>(v.route.front())].entry_queue.push_back(v.id);
    ++entered_;
    ++next_arrival_;
  }
  for (const Link& l : net_->links()) {
    if (!l.is_source) continue;
    LinkRuntime& lr = links_[static_cast<std::size_t>(l.id)];
    while (!lr.entry_queue.empty() &&
           (cfg_.unbounded_storage || lr.on_link < l.storage_capacity)) {
      std::int32_t vid = lr.entry_queue.front();
      lr.entry_queue.pop_front();
      lr.traversing.push_back(
          {clock_.step + travel_steps_[static_cast<std::size_t>(l.id)], vid});
      ++lr.on_link;
      ++admitted;
    }
  }
  return admitted;
}

void Simulation::settle_completions() {
  for (const Link& l : net_->links()) {
    LinkRuntime& lr = links_[static_cast<std::size_t>(l.id)];
    while (!lr.traversing.empty() && lr.traversing.front().ready_step <= clock_.step) {
      std::int32_t vid = lr.traversing.front().vehicle;
      lr.traversing.pop_front();
      Vehicle& v = vehicles_[static_cast<std::size_t>(vid)];
      MovementId m = assign_to_movement(*net_, v, l.id);
      MovementRuntime& mr = movements_[static_cast<std::size_t>(m)];
      mr.queue.push_back(vid);
      mr.occupancy_sum += v.true_occupancy;
      if (v.klass == VehicleClass::kBus) ++mr.bus_count;
    }
  }
}

StepResult Simulation::step() {
  StepResult result;
  result.admitted = admit_arrivals();

  // Per-movement integer service quotas for this step.
  std::fill(granted_.begin(), granted_.end(), 0);
  std::fill(allowed_.begin(), allowed_.end(), 0);
  for (std::size_t i = 0; i < net_->intersections().size(); ++i) {
    SignalRuntime& sig = signals_[i];
    if (sig.all_red_remaining > 0) {
      --sig.all_red_remaining;
      continue;
    }
    const Intersection& it = net_->intersections()[i];
    const Phase& ph = it.phases[static_cast<std::size_t>(sig.active_phase)];
    for (MovementId m : ph.served) {
      double noise = 1.0;
      if (cfg_.stochastic_saturation) {
        double a = cfg_.saturation_noise_amplitude;
        noise = saturation_rng_.uniform(1.0 - a, 1.0 + a);
      }
      MovementRuntime& mr = movements_[static_cast<std::size_t>(m)];
      QuotaResult qr = service_quota(net_->movement(m).saturation_flow_vph, clock_.dt_s,
                                     mr.quota_carry, noise);
      mr.quota_carry = qr.carry;
      granted_[static_cast<std::size_t>(m)] = qr.granted;
      allowed_[static_cast<std::size_t>(m)] =
          std::min<int>(qr.granted, static_cast<int>(mr.queue.size()));
    }
  }

  // Downstream storage: when competing demand exceeds the free space of a
  // link, split the space in proportion to the service quotas with
  // largest-remainder rounding.
  if (!cfg_.unbounded_storage) {
    for (const Link& d : net_->links()) {
      if (d.is_sink || d.is_source) continue;
      long long want = 0, quota_sum = 0;
      int feeders = 0;
      int idx = net_->intersection_index(d.from);
      if (idx < 0) continue;  // fed from a centroid: entries handled as admissions
      const Intersection* up = &net_->intersections()[static_cast<std::size_t>(idx)];
      for (MovementId m : up->movements) {
        if (net_->movement(m).downstream != d.id) continue;
        want += allowed_[static_cast<std::size_t>(m)];
        quota_sum += granted_[static_cast<std::size_t>(m)];
        ++feeders;
      }
      if (feeders == 0 || want == 0) continue;
      long long space = d.storage_capacity - links_[static_cast<std::size_t>(d.id)].on_link;
      if (space < 0) space = 0;
      if (want <= space) continue;
      if (quota_sum == 0) continue;

      // shares = space * granted / quota_sum, rounded by largest remainder
      struct Share {
        MovementId m;
        long long base;
        double rem;
      };
      std::vector<Share> shares;
      long long base_sum = 0;
      for (MovementId m : up->movements) {
        if (net_->movement(m).downstream != d.id) continue;
        double exact = static_cast<double>(space) *
                       static_cast<double>(granted_[static_cast<std::size_t>(m)]) /
                       static_cast<double>(quota_sum);
        long long base = static_cast<long long>(std::floor(exact + 1e-9));
        shares.push_back({m, base, exact - static_cast<double>(base)});
        base_sum += base;
      }
      long long leftover = space - base_sum;
      std::stable_sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) {
        if (a.rem != b.rem) return a.rem > b.rem;
        return a.m < b.m;
      });
      for (Share& s : shares) {
        long long grant = s.base + (leftover > 0 ? 1 : 0);
        if (leftover > 0) --leftover;
        auto& cap = allowed_[static_cast<std::size_t>(s.m)];
        cap = std::min<long long>(cap, grant);
      }
    }
  }

  // Execute discharges in global movement order.
  for (const Movement& m : net_->movements()) {
    int n = allowed_[static_cast<std::size_t>(m.id)];
    if (n == 0) continue;
    MovementRuntime& mr = movements_[static_cast<std::size_t>(m.id)];
    const Link& down = net_->link(m.downstream);
    for (int k = 0; k < n; ++k) {
      std::int32_t vid = mr.queue.front();
      mr.queue.pop_front();
      Vehicle& v = vehicles_[static_cast<std::size_t>(vid)];
      mr.occupancy_sum -= v.true_occupancy;
      if (v.klass == VehicleClass::kBus) --mr.bus_count;
      --links_[static_cast<std::size_t>(m.upstream)].on_link;
      ++v.route_pos;
      ++v.intersection_crossings;
      if (v.klass == VehicleClass::kBus && crossing_hook_) crossing_hook_(v);
      if (down.is_sink) {
        v.exit_time_s = (static_cast<double>(clock_.step) + 1.0) * clock_.dt_s;
        ++exited_;
        result.exited.push_back(vid);
      } else {
        LinkRuntime& dr = links_[static_cast<std::size_t>(m.downstream)];
        ++dr.on_link;
        dr.traversing.push_back(
            {clock_.step + travel_steps_[static_cast<std::size_t>(m.downstream)], vid});
      }
      result.discharged.push_back(vid);
    }
  }

  settle_completions();

  ++clock_.step;
  if (clock_.step % sample_every_steps_ == 0) {
    ledger_.push_back({clock_.time_s(), entered_, exited_, entered_ - exited_});
    check_conservation();
  }
  return result;
}

long long Simulation::total_queue() const {
  long long q = 0;
  for (const MovementRuntime& mr : movements_) q += static_cast<long long>(mr.queue.size());
  return q;
}

void Simulation::check_conservation() {
  long long inside = 0;
  for (const LinkRuntime& lr : links_)
    inside += lr.on_link + static_cast<long long>(lr.entry_queue.size());
  if (inside != entered_ - exited_)
    throw InvariantViolation(
        "conservation violated at t=" + std::to_string(clock_.time_s()) +
        "s: entered=" + std::to_string(entered_) + " exited=" + std::to_string(exited_) +
        " inside=" + std::to_string(inside));
}

}  // namespace mpsim

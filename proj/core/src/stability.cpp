#include "mpsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "mpsim/dynamics.hpp"
#include "mpsim/rng.hpp"
#include "mpsim/sensing.hpp"

namespace mpsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(double demand, double saturation) {
  if (demand <= 0) return 0;
  if (saturation <= 0) return kInf;
  return demand / saturation;
}

}  // namespace

void FeasibilityProblem::validate() const {
  if (demand.size() != saturation.size() || demand.empty())
    throw ConfigError("feasibility: demand and saturation must match and be non-empty");
  for (double d : demand)
    if (d < 0) throw ConfigError("feasibility: demand must be >= 0");
  for (double c : saturation)
    if (c < 0) throw ConfigError("feasibility: saturation must be >= 0");
  if (phases.empty()) throw ConfigError("feasibility: no phases");
  for (const PhaseActivation& p : phases)
    for (int j : p.served)
      if (j < 0 || j >= static_cast<int>(demand.size()))
        throw ConfigError("feasibility: phase serves an unknown movement");
}

bool FeasibilityProblem::exclusive() const {
  std::vector<int> seen(demand.size(), 0);
  for (const PhaseActivation& p : phases)
    for (int j : p.served) ++seen[static_cast<std::size_t>(j)];
  return std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; });
}

FeasibilityResult is_feasible_closed_form(const FeasibilityProblem& p, double tolerance) {
  p.validate();
  if (!p.exclusive())
    throw ConfigError("feasibility closed form: phases must partition the movements");

  FeasibilityResult res;
  res.witness.assign(p.phases.size(), 0);
  double util = 0;
  for (std::size_t e = 0; e < p.phases.size(); ++e) {
    double worst = 0;
    for (int j : p.phases[e].served)
      worst = std::max(worst, ratio(p.demand[static_cast<std::size_t>(j)],
                                    p.saturation[static_cast<std::size_t>(j)]));
    res.witness[e] = worst;
    util += worst;
  }
  res.utilization = util;
  res.feasible = util <= 1.0 + tolerance;
  res.slack = res.feasible && std::isfinite(util) ? 1.0 - util : 0.0;
  return res;
}

namespace {

// Minimizes `objective` over the phase-share simplex by nested grid
// refinement plus a pairwise mass-transfer polish. Suited to the convex /
// quasiconvex objectives used here.
struct SimplexSearch {
  int dims;
  double resolution;
  std::function<double(const std::vector<double>&)> objective;

  std::vector<double> best_point;
  double best_value = kInf;

  void consider(const std::vector<double>& lambda) {
    double v = objective(lambda);
    if (v < best_value) {
      best_value = v;
      best_point = lambda;
    }
  }

  void enumerate(std::vector<double>& lambda, const std::vector<double>& low, double width,
                 int n, int dim, int remaining) {
    if (dim == dims - 1) {
      lambda[static_cast<std::size_t>(dim)] =
          low[static_cast<std::size_t>(dim)] + width * remaining / n;
      consider(lambda);
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      lambda[static_cast<std::size_t>(dim)] = low[static_cast<std::size_t>(dim)] + width * k / n;
      enumerate(lambda, low, width, n, dim + 1, remaining - k);
    }
  }

  void run() {
    if (dims > 6)
      throw ConfigError("feasibility grid: more than 6 phases; use the closed form");
    if (dims == 1) {
      best_point = {1.0};
      best_value = objective(best_point);
      return;
    }
    const int n = std::max(16, 4 * dims);
    std::vector<double> low(static_cast<std::size_t>(dims), 0.0);
    double width = 1.0;
    std::vector<double> lambda(static_cast<std::size_t>(dims), 0.0);
    for (int level = 0; level < 64; ++level) {
      double res = width / n;
      enumerate(lambda, low, width, n, 0, n);
      if (res <= resolution) break;
      // Shrink the box around the incumbent, keeping a 2-cell margin.
      std::vector<double> next_low(static_cast<std::size_t>(dims));
      for (int e = 0; e < dims; ++e)
        next_low[static_cast<std::size_t>(e)] =
            std::max(low[static_cast<std::size_t>(e)],
                     best_point[static_cast<std::size_t>(e)] - 2.0 * res);
      double next_width = 1.0;
      for (double lo : next_low) next_width -= lo;
      if (next_width <= 0 || next_width >= width) break;
      low = std::move(next_low);
      width = next_width;
    }
    polish();
  }

  void polish() {
    double step = std::max(resolution, 1.0 / 64.0);
    std::vector<double> cand;
    while (step >= resolution / 16.0) {
      bool improved = true;
      int guard = 0;
      while (improved && guard++ < 512) {
        improved = false;
        for (int a = 0; a < dims; ++a) {
          for (int b = 0; b < dims; ++b) {
            if (a == b || best_point[static_cast<std::size_t>(b)] < step) continue;
            cand = best_point;
            cand[static_cast<std::size_t>(a)] += step;
            cand[static_cast<std::size_t>(b)] -= step;
            double v = objective(cand);
            if (v < best_value - 1e-15) {
              best_value = v;
              best_point = cand;
              improved = true;
            }
          }
        }
      }
      step *= 0.5;
    }
  }
};

double utilization_at(const FeasibilityProblem& p, const std::vector<double>& lambda) {
  std::vector<double> share(p.demand.size(), 0.0);
  for (std::size_t e = 0; e < p.phases.size(); ++e)
    for (int j : p.phases[e].served) share[static_cast<std::size_t>(j)] += lambda[e];
  double util = 0;
  for (std::size_t j = 0; j < p.demand.size(); ++j) {
    if (p.demand[j] <= 0) continue;
    double service = p.saturation[j] * share[j];
    util = std::max(util, service > 0 ? p.demand[j] / service : kInf);
  }
  return util;
}

double excess_at(const FeasibilityProblem& p, const std::vector<double>& lambda) {
  std::vector<double> share(p.demand.size(), 0.0);
  for (std::size_t e = 0; e < p.phases.size(); ++e)
    for (int j : p.phases[e].served) share[static_cast<std::size_t>(j)] += lambda[e];
  double excess = 0;
  for (std::size_t j = 0; j < p.demand.size(); ++j)
    excess += std::max(0.0, p.demand[j] - p.saturation[j] * share[j]);
  return excess;
}

}  // namespace

FeasibilityResult is_feasible_grid(const FeasibilityProblem& p, double tolerance,
                                   double resolution) {
  p.validate();
  if (resolution <= 0) throw ConfigError("feasibility grid: resolution must be positive");

  SimplexSearch search;
  search.dims = static_cast<int>(p.phases.size());
  search.resolution = resolution;
  search.objective = [&p](const std::vector<double>& lambda) {
    return utilization_at(p, lambda);
  };
  search.run();

  FeasibilityResult res;
  res.utilization = search.best_value;
  res.witness = search.best_point;
  res.feasible = res.utilization <= 1.0 + tolerance;
  res.slack = 0.0;
  return res;
}

FeasibilityResult is_feasible(const FeasibilityProblem& p, double tolerance) {
  p.validate();
  if (p.exclusive()) return is_feasible_closed_form(p, tolerance);
  return is_feasible_grid(p, tolerance);
}

double min_excess_rate(const FeasibilityProblem& p, double resolution) {
  p.validate();
  SimplexSearch search;
  search.dims = static_cast<int>(p.phases.size());
  search.resolution = resolution;
  search.objective = [&p](const std::vector<double>& lambda) { return excess_at(p, lambda); };
  search.run();
  return search.best_value;
}

double boundary_scale(const FeasibilityProblem& direction) {
  direction.validate();
  double util = direction.exclusive()
                    ? is_feasible_closed_form(direction, 0).utilization
                    : is_feasible_grid(direction, 0, 1e-4).utilization;
  if (util <= 0 || !std::isfinite(util))
    throw ConfigError("boundary_scale: direction has no finite positive utilization");
  return 1.0 / util;
}

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::kBounded: return "bounded";
    case StabilityVerdict::kGrowing: return "growing";
    case StabilityVerdict::kIndeterminate: return "indeterminate";
  }
  return "?";
}

StabilityTrialOutcome run_stability_trial(const StabilityTrialConfig& cfg,
                                          std::uint64_t seed) {
  if (cfg.horizon_steps < 5000)
    throw ConfigError("stability trial: horizon must be at least 5000 steps");
  if (cfg.kappa <= 0) throw ConfigError("stability trial: kappa must be positive");
  cfg.occupancy.validate();

  NetworkGraph net = build_grid(1, 1, cfg.link);
  const Intersection& junction = net.intersections().front();

  FeasibilityProblem direction;
  for (MovementId m : junction.movements) {
    direction.demand.push_back(1.0);
    direction.saturation.push_back(net.movement(m).saturation_flow_vph / 3600.0 * cfg.dt_s);
  }
  for (const Phase& ph : junction.phases) {
    PhaseActivation act;
    for (MovementId m : ph.served) {
      auto pos = std::find(junction.movements.begin(), junction.movements.end(), m);
      act.served.push_back(static_cast<int>(pos - junction.movements.begin()));
    }
    direction.phases.push_back(act);
  }

  StabilityTrialOutcome out;
  out.boundary_scale = boundary_scale(direction);
  const double rate_per_step = cfg.kappa * out.boundary_scale;  // veh/step per movement

  FeasibilityProblem loaded = direction;
  for (double& d : loaded.demand) d = rate_per_step;
  out.excess_rate_veh_per_step = cfg.kappa > 1.0 ? min_excess_rate(loaded) : 0.0;

  // Poisson arrivals per movement, i.i.d. occupancies, route = one hop.
  std::vector<Vehicle> vehicles;
  for (std::size_t ji = 0; ji < junction.movements.size(); ++ji) {
    const Movement& m = net.movement(junction.movements[ji]);
    Rng times(substream_seed(seed, Stream::kStability, ji, 0));
    Rng occ(substream_seed(seed, Stream::kStability, ji, 1));
    const double horizon_s = static_cast<double>(cfg.horizon_steps) * cfg.dt_s;
    const double mean_gap_s = cfg.dt_s / rate_per_step;
    double t = times.exponential(mean_gap_s);
    while (t < horizon_s) {
      Vehicle v;
      v.klass = VehicleClass::kCar;
      v.true_occupancy = cfg.occupancy.sample(occ);
      v.reported_occupancy = v.true_occupancy;
      v.route = {m.upstream, m.downstream};
      v.entry_time_s = t;
      vehicles.push_back(std::move(v));
      t += times.exponential(mean_gap_s);
    }
  }
  std::stable_sort(vehicles.begin(), vehicles.end(), [](const Vehicle& a, const Vehicle& b) {
    return a.entry_time_s < b.entry_time_s;
  });
  for (std::size_t i = 0; i < vehicles.size(); ++i)
    vehicles[i].id = static_cast<std::int32_t>(i);

  DynamicsConfig dyn;
  dyn.dt_s = cfg.dt_s;
  dyn.unbounded_storage = true;
  Simulation sim(net, dyn, std::move(vehicles), seed);

  IntersectionControlView view = make_control_view(net, junction);
  SensingConfig sensing;  // exact, full information
  std::vector<double> turn_ratios;
  for (const Movement& m : net.movements()) turn_ratios.push_back(m.turn_ratio);

  ControllerConfig ctrl;
  ctrl.kind = cfg.controller;
  ctrl.bus_bonus = cfg.bus_bonus;

  std::vector<double> queue_series;
  queue_series.reserve(static_cast<std::size_t>(cfg.horizon_steps));
  int current_phase = 0;
  int pending_phase = -1;
  for (long long t = 0; t < cfg.horizon_steps; ++t) {
    if (pending_phase >= 0) {
      sim.set_active_phase(0, pending_phase);
      pending_phase = -1;
    }
    if (t % cfg.control_interval_steps == 0) {
      Observation obs = observe(net, sim, 0, sensing, turn_ratios);
      PhaseDecision d = select_phase(view, obs, current_phase, ctrl);
      pending_phase = d.phase;
      current_phase = d.phase;
    }
    sim.step();
    queue_series.push_back(static_cast<double>(sim.total_queue()));
  }

  const std::size_t H = queue_series.size();
  auto mean_over = [&](std::size_t lo, std::size_t hi) {
    double s = 0;
    for (std::size_t i = lo; i < hi; ++i) s += queue_series[i];
    return s / static_cast<double>(hi - lo);
  };
  out.q2_mean = mean_over(H / 4, H / 2);
  out.q4_mean = mean_over(3 * H / 4, H);

  // Least-squares slope over the last half.
  std::size_t lo = H / 2;
  double n = static_cast<double>(H - lo);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = lo; i < H; ++i) {
    double x = static_cast<double>(i);
    sx += x;
    sy += queue_series[i];
    sxx += x * x;
    sxy += x * queue_series[i];
  }
  double denom = n * sxx - sx * sx;
  out.slope_veh_per_step = denom != 0 ? (n * sxy - sx * sy) / denom : 0.0;

  if (out.q4_mean < 1.5 * out.q2_mean) {
    out.verdict = StabilityVerdict::kBounded;
  } else if (out.excess_rate_veh_per_step > 0 &&
             out.slope_veh_per_step > 0.25 * out.excess_rate_veh_per_step) {
    out.verdict = StabilityVerdict::kGrowing;
  } else {
    out.verdict = StabilityVerdict::kIndeterminate;
  }
  return out;
}

}  // namespace mpsim

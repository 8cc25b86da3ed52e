#include "mpsim/controllers.hpp"

#include <algorithm>

namespace mpsim {

const char* to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::kQmp: return "q-mp";
    case ControllerKind::kOccMp: return "occ-mp";
    case ControllerKind::kRbMp: return "rb-mp";
  }
  return "?";
}

ControllerKind controller_from_string(const std::string& s) {
  if (s == "q-mp" || s == "qmp") return ControllerKind::kQmp;
  if (s == "occ-mp" || s == "occmp") return ControllerKind::kOccMp;
  if (s == "rb-mp" || s == "rbmp") return ControllerKind::kRbMp;
  throw ConfigError("controller: expected q-mp|occ-mp|rb-mp, got '" + s + "'");
}

IntersectionControlView make_control_view(const NetworkGraph& net,
                                          const Intersection& intersection) {
  IntersectionControlView view;
  view.saturation_vps.reserve(intersection.movements.size());
  for (MovementId m : intersection.movements)
    view.saturation_vps.push_back(net.movement(m).saturation_flow_vph / 3600.0);

  view.phase_served.resize(intersection.phases.size());
  for (const Phase& p : intersection.phases) {
    for (MovementId m : p.served) {
      auto pos = std::find(intersection.movements.begin(), intersection.movements.end(), m);
      if (pos == intersection.movements.end())
        throw InvariantViolation("control view: phase serves a foreign movement");
      view.phase_served[static_cast<std::size_t>(p.index)].push_back(
          static_cast<int>(pos - intersection.movements.begin()));
    }
  }
  return view;
}

double qmp_weight(const MovementObservation& mo, bool is_isolated, bool clip) {
  double w = static_cast<double>(mo.queue);
  if (!is_isolated)
    for (const DownstreamEntry& d : mo.downstream)
      w -= static_cast<double>(d.queue) * d.turn_ratio;
  if (clip && w < 0) w = 0;
  return w;
}

double occmp_weight(const MovementObservation& mo, bool is_isolated) {
  if (mo.queue <= 0) return 0;
  double avg_occ = mo.occupancy_sum / static_cast<double>(mo.queue);
  return avg_occ * std::max(0.0, qmp_weight(mo, is_isolated, false));
}

double rbmp_weight(const MovementObservation& mo, bool is_isolated, double bus_bonus) {
  double w = qmp_weight(mo, is_isolated, false);
  if (mo.bus_count > 0) w += bus_bonus;
  return w;
}

double phase_pressure(const std::vector<double>& weights, const std::vector<int>& served,
                      const std::vector<double>& saturation_vps) {
  double p = 0;
  for (int idx : served)
    p += weights[static_cast<std::size_t>(idx)] * saturation_vps[static_cast<std::size_t>(idx)];
  return p;
}

PhaseDecision select_phase(const IntersectionControlView& view, const Observation& obs,
                           int current_phase, const ControllerConfig& cfg) {
  if (obs.movements.size() != view.saturation_vps.size())
    throw InvariantViolation("select_phase: observation does not match control view");

  std::vector<double> weights(obs.movements.size());
  for (std::size_t i = 0; i < obs.movements.size(); ++i) {
    const MovementObservation& mo = obs.movements[i];
    switch (cfg.kind) {
      case ControllerKind::kQmp:
        weights[i] = qmp_weight(mo, obs.is_isolated, cfg.clip_negative);
        break;
      case ControllerKind::kOccMp:
        weights[i] = occmp_weight(mo, obs.is_isolated);
        break;
      case ControllerKind::kRbMp:
        weights[i] = rbmp_weight(mo, obs.is_isolated, cfg.bus_bonus);
        break;
    }
  }

  PhaseDecision d;
  d.pressures.reserve(view.phase_served.size());
  for (const std::vector<int>& served : view.phase_served)
    d.pressures.push_back(phase_pressure(weights, served, view.saturation_vps));

  double best = d.pressures.empty() ? 0 : *std::max_element(d.pressures.begin(), d.pressures.end());
  if (current_phase >= 0 && current_phase < static_cast<int>(d.pressures.size()) &&
      d.pressures[static_cast<std::size_t>(current_phase)] == best) {
    d.phase = current_phase;
  } else {
    for (std::size_t i = 0; i < d.pressures.size(); ++i) {
      if (d.pressures[i] == best) {
        d.phase = static_cast<int>(i);
        break;
      }
    }
  }
  return d;
}

PhaseDecision select_phase_qmp(const IntersectionControlView& view, const Observation& obs,
                               int current_phase, bool clip) {
  ControllerConfig cfg;
  cfg.kind = ControllerKind::kQmp;
  cfg.clip_negative = clip;
  return select_phase(view, obs, current_phase, cfg);
}

PhaseDecision select_phase_occmp(const IntersectionControlView& view, const Observation& obs,
                                 int current_phase) {
  ControllerConfig cfg;
  cfg.kind = ControllerKind::kOccMp;
  return select_phase(view, obs, current_phase, cfg);
}

PhaseDecision select_phase_rbmp(const IntersectionControlView& view, const Observation& obs,
                                int current_phase, double bus_bonus) {
  ControllerConfig cfg;
  cfg.kind = ControllerKind::kRbMp;
  cfg.bus_bonus = bus_bonus;
  return select_phase(view, obs, current_phase, cfg);
}

}  // namespace mpsim

#include "mpsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace mpsim {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[value & 0xf];
    value >>= 4;
  }
  return s;
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("name: must not be empty");
  if (rows < 1 || cols < 1) throw ConfigError("grid: rows and cols must be >= 1");
  if (link.length_m <= 0 || link.free_flow_kmh <= 0 || link.saturation_flow_vph <= 0 ||
      link.lanes < 1 || link.jam_spacing_m <= 0)
    throw ConfigError("grid.link: all fields must be positive");
  if (control_interval_s <= 0) throw ConfigError("control_interval_s: must be positive");
  if (dynamics.dt_s <= 0) throw ConfigError("dynamics.dt_s: must be positive");
  if (std::fmod(control_interval_s, dynamics.dt_s) != 0)
    throw ConfigError("control_interval_s: must be a multiple of dynamics.dt_s");
  if (dynamics.lost_time_steps < 0)
    throw ConfigError("dynamics.lost_time_steps: must be >= 0");
  if (dynamics.saturation_noise_amplitude < 0 || dynamics.saturation_noise_amplitude >= 1)
    throw ConfigError("dynamics.saturation_noise_amplitude: must be in [0, 1)");

  if (demand.target_total_veh < 0)
    throw ConfigError("demand.target_total_veh: must be >= 0");
  if (demand.ns_ew_ratio <= 0) throw ConfigError("demand.ns_ew_ratio: must be positive");
  if (demand.multipliers.empty())
    throw ConfigError("demand.multipliers: must not be empty");
  for (double m : demand.multipliers)
    if (m < 0) throw ConfigError("demand.multipliers: entries must be >= 0");
  if (demand.interval_s <= 0) throw ConfigError("demand.interval_s: must be positive");
  if (demand.cooldown_s < 0) throw ConfigError("demand.cooldown_s: must be >= 0");
  try {
    demand.occupancy.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("demand.occupancy: ") + e.what());
  }

  if (transit.enabled) {
    if (transit.headway_s <= 0) throw ConfigError("transit.headway_s: must be positive");
    if (transit.high_occupancy_mean < 1 || transit.low_occupancy_mean < 1)
      throw ConfigError("transit: occupancy means must be >= 1");
    if (transit.capacity < 1) throw ConfigError("transit.capacity: must be >= 1");
    if (transit.spread_frac < 0) throw ConfigError("transit.spread_frac: must be >= 0");
    if (transit.routes.empty())
      throw ConfigError("transit.routes: must not be empty when transit is enabled");
    for (std::size_t i = 0; i < transit.routes.size(); ++i) {
      const BusRoutePattern& r = transit.routes[i];
      std::string path = "transit.routes[" + std::to_string(i) + "]";
      if (r.name.empty()) throw ConfigError(path + ".name: must not be empty");
      if (r.entry_centroid.empty() || r.exit_centroid.empty())
        throw ConfigError(path + ": entry and exit centroids are required");
    }
  }

  if (routing.k < 1) throw ConfigError("routing.k: must be >= 1");
  if (routing.theta < 0) throw ConfigError("routing.theta: must be >= 0");

  try {
    sensing.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("sensing: ") + e.what());
  }

  if (levels.demand_low_veh < 0 || levels.demand_high_veh < 0)
    throw ConfigError("levels: demand values must be >= 0");
  if (levels.headway_low_s <= 0 || levels.headway_high_s <= 0)
    throw ConfigError("levels: headways must be positive");
}

namespace {

json link_to_json(const LinkSpec& l) {
  return json{{"length_m", l.length_m},
              {"lanes", l.lanes},
              {"free_flow_kmh", l.free_flow_kmh},
              {"saturation_flow_vph", l.saturation_flow_vph},
              {"jam_spacing_m", l.jam_spacing_m}};
}

LinkSpec link_from_json(const json& j) {
  LinkSpec l;
  l.length_m = j.at("length_m").get<double>();
  l.lanes = j.at("lanes").get<int>();
  l.free_flow_kmh = j.at("free_flow_kmh").get<double>();
  l.saturation_flow_vph = j.at("saturation_flow_vph").get<double>();
  l.jam_spacing_m = j.at("jam_spacing_m").get<double>();
  return l;
}

}  // namespace

std::string ScenarioConfig::to_json_string(int indent) const {
  json j;
  j["schema"] = "mpsim-scenario-v1";
  j["name"] = name;
  j["grid"] = {{"rows", rows}, {"cols", cols}, {"link", link_to_json(link)}};
  j["control_interval_s"] = control_interval_s;
  j["dynamics"] = {{"dt_s", dynamics.dt_s},
                   {"lost_time_steps", dynamics.lost_time_steps},
                   {"stochastic_saturation", dynamics.stochastic_saturation},
                   {"saturation_noise_amplitude", dynamics.saturation_noise_amplitude}};
  j["demand"] = {{"target_total_veh", demand.target_total_veh},
                 {"ns_ew_ratio", demand.ns_ew_ratio},
                 {"multipliers", demand.multipliers},
                 {"interval_s", demand.interval_s},
                 {"cooldown_s", demand.cooldown_s},
                 {"occupancy",
                  {{"values", demand.occupancy.values}, {"probs", demand.occupancy.probs}}}};
  json routes = json::array();
  for (const BusRoutePattern& r : transit.routes)
    routes.push_back({{"name", r.name},
                      {"entry", r.entry_centroid},
                      {"exit", r.exit_centroid},
                      {"via", r.via_nodes},
                      {"high_occupancy", r.high_occupancy}});
  j["transit"] = {{"enabled", transit.enabled},
                  {"headway_s", transit.headway_s},
                  {"high_occupancy_mean", transit.high_occupancy_mean},
                  {"low_occupancy_mean", transit.low_occupancy_mean},
                  {"capacity", transit.capacity},
                  {"spread_frac", transit.spread_frac},
                  {"routes", routes}};
  j["routing"] = {{"k", routing.k}, {"theta", routing.theta}};
  j["sensing"] = {{"mode", to_string(sensing.mode)},
                  {"fixed_average_value", sensing.fixed_average_value},
                  {"apc_sigma_pct", sensing.apc_sigma_pct},
                  {"cv_penetration", sensing.cv_penetration},
                  {"buses_always_connected", sensing.buses_always_connected}};
  j["levels"] = {{"demand_low_veh", levels.demand_low_veh},
                 {"demand_high_veh", levels.demand_high_veh},
                 {"headway_low_s", levels.headway_low_s},
                 {"headway_high_s", levels.headway_high_s},
                 {"pax_high_route_means",
                  {levels.pax_high_route_means[0], levels.pax_high_route_means[1]}},
                 {"pax_low_route_means",
                  {levels.pax_low_route_means[0], levels.pax_low_route_means[1]}}};
  return j.dump(indent);
}

ScenarioConfig ScenarioConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    if (j.value("schema", "") != "mpsim-scenario-v1")
      throw ConfigError("schema: expected \"mpsim-scenario-v1\"");
    cfg.name = j.at("name").get<std::string>();
    const json& g = j.at("grid");
    cfg.rows = g.at("rows").get<int>();
    cfg.cols = g.at("cols").get<int>();
    cfg.link = link_from_json(g.at("link"));
    cfg.control_interval_s = j.at("control_interval_s").get<double>();
    const json& dyn = j.at("dynamics");
    cfg.dynamics.dt_s = dyn.at("dt_s").get<double>();
    cfg.dynamics.lost_time_steps = dyn.at("lost_time_steps").get<int>();
    cfg.dynamics.stochastic_saturation = dyn.at("stochastic_saturation").get<bool>();
    cfg.dynamics.saturation_noise_amplitude =
        dyn.at("saturation_noise_amplitude").get<double>();
    const json& d = j.at("demand");
    cfg.demand.target_total_veh = d.at("target_total_veh").get<double>();
    cfg.demand.ns_ew_ratio = d.at("ns_ew_ratio").get<double>();
    cfg.demand.multipliers = d.at("multipliers").get<std::vector<double>>();
    cfg.demand.interval_s = d.at("interval_s").get<double>();
    cfg.demand.cooldown_s = d.at("cooldown_s").get<double>();
    cfg.demand.occupancy.values = d.at("occupancy").at("values").get<std::vector<int>>();
    cfg.demand.occupancy.probs = d.at("occupancy").at("probs").get<std::vector<double>>();
    const json& t = j.at("transit");
    cfg.transit.enabled = t.at("enabled").get<bool>();
    cfg.transit.headway_s = t.at("headway_s").get<double>();
    cfg.transit.high_occupancy_mean = t.at("high_occupancy_mean").get<double>();
    cfg.transit.low_occupancy_mean = t.at("low_occupancy_mean").get<double>();
    cfg.transit.capacity = t.at("capacity").get<double>();
    cfg.transit.spread_frac = t.at("spread_frac").get<double>();
    cfg.transit.routes.clear();
    for (const json& rj : t.at("routes")) {
      BusRoutePattern r;
      r.name = rj.at("name").get<std::string>();
      r.entry_centroid = rj.at("entry").get<std::string>();
      r.exit_centroid = rj.at("exit").get<std::string>();
      r.via_nodes = rj.at("via").get<std::vector<std::string>>();
      r.high_occupancy = rj.at("high_occupancy").get<bool>();
      cfg.transit.routes.push_back(std::move(r));
    }
    const json& ro = j.at("routing");
    cfg.routing.k = ro.at("k").get<int>();
    cfg.routing.theta = ro.at("theta").get<double>();
    const json& s = j.at("sensing");
    cfg.sensing.mode = occupancy_mode_from_string(s.at("mode").get<std::string>());
    cfg.sensing.fixed_average_value = s.at("fixed_average_value").get<double>();
    cfg.sensing.apc_sigma_pct = s.at("apc_sigma_pct").get<double>();
    cfg.sensing.cv_penetration = s.at("cv_penetration").get<double>();
    cfg.sensing.buses_always_connected = s.at("buses_always_connected").get<bool>();
    const json& lv = j.at("levels");
    cfg.levels.demand_low_veh = lv.at("demand_low_veh").get<double>();
    cfg.levels.demand_high_veh = lv.at("demand_high_veh").get<double>();
    cfg.levels.headway_low_s = lv.at("headway_low_s").get<double>();
    cfg.levels.headway_high_s = lv.at("headway_high_s").get<double>();
    cfg.levels.pax_high_route_means[0] = lv.at("pax_high_route_means").at(0).get<double>();
    cfg.levels.pax_high_route_means[1] = lv.at("pax_high_route_means").at(1).get<double>();
    cfg.levels.pax_low_route_means[0] = lv.at("pax_low_route_means").at(0).get<double>();
    cfg.levels.pax_low_route_means[1] = lv.at("pax_low_route_means").at(1).get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::uint64_t ScenarioConfig::hash() const { return fnv1a64(to_json_string(0)); }

namespace {

std::string grid_node_name(int r, int c) {
  return "n" + std::to_string(r) + "_" + std::to_string(c);
}

std::vector<std::string> column_via(int rows, int col, bool southbound) {
  std::vector<std::string> via;
  for (int r = 0; r < rows; ++r) via.push_back(grid_node_name(r, col));
  if (!southbound) std::reverse(via.begin(), via.end());
  return via;
}

std::vector<std::string> row_via(int cols, int row, bool eastbound) {
  std::vector<std::string> via;
  for (int c = 0; c < cols; ++c) via.push_back(grid_node_name(row, c));
  if (!eastbound) std::reverse(via.begin(), via.end());
  return via;
}

}  // namespace

std::vector<BusRoutePattern> default_bus_routes(int rows, int cols) {
  if (rows < 2 || cols < 2)
    throw ConfigError("default_bus_routes: grid must be at least 2x2");
  const int col_w = std::max(1, cols / 4);
  const int col_c = cols / 2;
  const int row_n = 0;
  const int row_cn = std::max(1, rows / 3);
  const int row_cs = std::min(rows - 2, (2 * rows) / 3);
  const int row_s = rows - 1;

  auto n = [](int c) { return "N" + std::to_string(c); };
  auto s = [](int c) { return "S" + std::to_string(c); };
  auto w = [](int r) { return "W" + std::to_string(r); };
  auto e = [](int r) { return "E" + std::to_string(r); };

  std::vector<BusRoutePattern> routes;
  routes.push_back({"SB-W", n(col_w), s(col_w), column_via(rows, col_w, true), true});
  routes.push_back({"NB-W", s(col_w), n(col_w), column_via(rows, col_w, false), true});
  routes.push_back({"SB-C", n(col_c), s(col_c), column_via(rows, col_c, true), true});
  routes.push_back({"NB-C", s(col_c), n(col_c), column_via(rows, col_c, false), true});
  routes.push_back({"EB-N", w(row_n), e(row_n), row_via(cols, row_n, true), true});
  routes.push_back({"WB-N", e(row_n), w(row_n), row_via(cols, row_n, false), true});
  routes.push_back({"EB-CN", w(row_cn), e(row_cn), row_via(cols, row_cn, true), true});
  routes.push_back({"WB-CS", e(row_cs), w(row_cs), row_via(cols, row_cs, false), false});
  routes.push_back({"EB-S", w(row_s), e(row_s), row_via(cols, row_s, true), false});
  routes.push_back({"WB-S", e(row_s), w(row_s), row_via(cols, row_s, false), false});
  return routes;
}

ScenarioConfig full_preset() {
  ScenarioConfig cfg;
  cfg.name = "full";
  cfg.rows = 8;
  cfg.cols = 8;
  cfg.demand.interval_s = 1800;
  cfg.demand.cooldown_s = 3600;
  cfg.levels.demand_low_veh = 23040;
  cfg.levels.demand_high_veh = 32256;
  cfg.levels.headway_low_s = 300;
  cfg.levels.headway_high_s = 120;
  cfg.demand.target_total_veh = cfg.levels.demand_low_veh;
  cfg.transit.headway_s = cfg.levels.headway_high_s;
  cfg.transit.routes = default_bus_routes(cfg.rows, cfg.cols);
  cfg.validate();
  return cfg;
}

ScenarioConfig desk_preset() {
  ScenarioConfig full = full_preset();
  ScenarioConfig cfg;
  cfg.name = "desk";
  cfg.rows = 4;
  cfg.cols = 4;
  cfg.demand.interval_s = 675;
  cfg.demand.cooldown_s = 900;
  // Start from the full preset's per-link entry rates: scale totals by the
  // boundary-link ratio (16/32) and the window ratio (2700 s / 7200 s).
  const double links_ratio =
      static_cast<double>(2 * (cfg.rows + cfg.cols)) / (2 * (full.rows + full.cols));
  const double window_ratio = cfg.variation_window_s() / full.variation_window_s();
  // Rate preservation alone under-loads the smaller grid (shorter trips, less
  // path overlap), leaving queues too sparse for the controllers to separate.
  // A 1.75x load factor restores saturation comparable to the full preset
  // while still flushing completely within the cooldown window.
  const double load_factor = 1.75;
  cfg.levels.demand_low_veh =
      full.levels.demand_low_veh * links_ratio * window_ratio * load_factor;
  cfg.levels.demand_high_veh =
      full.levels.demand_high_veh * links_ratio * window_ratio * load_factor;
  // Halved service frequency keeps the bus share of passengers near the full
  // preset's despite the shorter routes.
  cfg.levels.headway_low_s = 600;
  cfg.levels.headway_high_s = 240;
  cfg.demand.target_total_veh = cfg.levels.demand_low_veh;
  cfg.transit.headway_s = cfg.levels.headway_high_s;
  cfg.transit.routes = default_bus_routes(cfg.rows, cfg.cols);
  cfg.validate();
  return cfg;
}

void apply_levels(ScenarioConfig& cfg, const SubScenario& sub) {
  cfg.demand.target_total_veh = sub.private_demand == Level::kHigh
                                    ? cfg.levels.demand_high_veh
                                    : cfg.levels.demand_low_veh;
  cfg.transit.headway_s = sub.bus_frequency == Level::kHigh ? cfg.levels.headway_high_s
                                                            : cfg.levels.headway_low_s;
  const double* means = sub.bus_passenger_demand == Level::kHigh
                            ? cfg.levels.pax_high_route_means
                            : cfg.levels.pax_low_route_means;
  cfg.transit.high_occupancy_mean = means[0];
  cfg.transit.low_occupancy_mean = means[1];
}

}  // namespace mpsim

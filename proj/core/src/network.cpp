#include "mpsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace mpsim {

using nlohmann::json;

const char* to_string(Heading h) {
  switch (h) {
    case Heading::kNorth: return "north";
    case Heading::kEast: return "east";
    case Heading::kSouth: return "south";
    case Heading::kWest: return "west";
  }
  return "?";
}

const char* to_string(Turn t) {
  switch (t) {
    case Turn::kLeft: return "left";
    case Turn::kThrough: return "through";
    case Turn::kRight: return "right";
  }
  return "?";
}

int Link::travel_steps(double dt_s) const {
  if (dt_s <= 0) throw ConfigError("link.travel_steps: dt must be positive");
  return std::max(1, static_cast<int>(std::ceil(free_flow_time_s() / dt_s - 1e-9)));
}

int storage_capacity_of(double length_m, int lanes, double jam_spacing_m) {
  if (length_m <= 0 || lanes < 1 || jam_spacing_m <= 0)
    throw ConfigError("storage_capacity_of: length, lanes and jam spacing must be positive");
  return std::max(1, static_cast<int>(std::floor(length_m * lanes / jam_spacing_m)));
}

bool movements_compatible(Heading a_heading, Turn a_turn, Heading b_heading,
                          Turn b_turn) {
  if (a_heading == b_heading) return true;  // same approach, diverging paths
  if (a_heading != opposite(b_heading)) return false;  // crossing streams
  // Opposing approaches: protected lefts pair with each other, everything
  // else pairs as long as neither is a left turn.
  if (a_turn == Turn::kLeft || b_turn == Turn::kLeft)
    return a_turn == Turn::kLeft && b_turn == Turn::kLeft;
  return true;
}

const Movement* NetworkGraph::find_movement(LinkId upstream, LinkId downstream) const {
  if (upstream < 0 || upstream >= static_cast<LinkId>(links_.size())) return nullptr;
  for (MovementId m : movements_from_[static_cast<std::size_t>(upstream)]) {
    if (movements_[static_cast<std::size_t>(m)].downstream == downstream)
      return &movements_[static_cast<std::size_t>(m)];
  }
  return nullptr;
}

int NetworkGraph::intersection_index(NodeId node) const {
  if (node < 0 || node >= static_cast<NodeId>(intersection_index_.size())) return -1;
  return intersection_index_[static_cast<std::size_t>(node)];
}

NodeId NetworkGraph::grid_node(int row, int col) const {
  if (grid_rows_ <= 0 || grid_cols_ <= 0)
    throw ConfigError("grid_node: network has no grid metadata");
  if (row < 0 || row >= grid_rows_ || col < 0 || col >= grid_cols_)
    throw ConfigError("grid_node: coordinates out of range");
  return static_cast<NodeId>(row * grid_cols_ + col);
}

const Centroid& NetworkGraph::centroid_by_name(const std::string& name) const {
  for (const Centroid& c : centroids_)
    if (c.name == name) return c;
  throw ConfigError("centroid_by_name: unknown centroid '" + name + "'");
}

std::vector<LinkId> NetworkGraph::source_links() const {
  std::vector<LinkId> out;
  for (const Link& l : links_)
    if (l.is_source) out.push_back(l.id);
  return out;
}

std::vector<LinkId> NetworkGraph::sink_links() const {
  std::vector<LinkId> out;
  for (const Link& l : links_)
    if (l.is_sink) out.push_back(l.id);
  return out;
}

void NetworkGraph::rebuild_indexes() {
  movements_from_.assign(links_.size(), {});
  for (const Movement& m : movements_)
    movements_from_[static_cast<std::size_t>(m.upstream)].push_back(m.id);
  intersection_index_.assign(nodes_.size(), -1);
  for (std::size_t i = 0; i < intersections_.size(); ++i)
    intersection_index_[static_cast<std::size_t>(intersections_[i].node)] =
        static_cast<int>(i);
}

void NetworkGraph::validate() const {
  for (const Link& l : links_) {
    if (l.length_m <= 0 || l.lanes < 1 || l.free_flow_kmh <= 0)
      throw ConfigError("network: link " + l.name + " has non-positive geometry");
    if (!l.is_sink && l.storage_capacity < 1)
      throw ConfigError("network: link " + l.name + " has no storage");
    if (l.from < 0 || l.to < 0 || l.from >= static_cast<NodeId>(nodes_.size()) ||
        l.to >= static_cast<NodeId>(nodes_.size()))
      throw ConfigError("network: link " + l.name + " references unknown nodes");
  }
  // Turn ratios over each non-sink link with movements must sum to one.
  for (std::size_t l = 0; l < links_.size(); ++l) {
    const auto& out = movements_from_[l];
    if (out.empty()) {
      if (!links_[l].is_sink)
        throw ConfigError("network: non-sink link " + links_[l].name +
                          " has no movements");
      continue;
    }
    double sum = 0;
    for (MovementId m : out) sum += movements_[static_cast<std::size_t>(m)].turn_ratio;
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("network: turn ratios on link " + links_[l].name +
                        " sum to " + std::to_string(sum));
  }
  for (const Movement& m : movements_) {
    if (m.saturation_flow_vph <= 0)
      throw ConfigError("network: movement has non-positive saturation flow");
    if (links_[static_cast<std::size_t>(m.upstream)].is_sink)
      throw ConfigError("network: movement departs from a sink link");
  }
  for (const Intersection& it : intersections_) {
    // Each movement of the intersection appears in exactly one phase.
    std::vector<int> seen(movements_.size(), 0);
    for (const Phase& p : it.phases) {
      if (p.served.empty())
        throw ConfigError("network: empty phase at node " + std::to_string(it.node));
      for (MovementId m : p.served) seen[static_cast<std::size_t>(m)]++;
      for (std::size_t a = 0; a < p.served.size(); ++a) {
        for (std::size_t b = a + 1; b < p.served.size(); ++b) {
          const Movement& ma = movements_[static_cast<std::size_t>(p.served[a])];
          const Movement& mb = movements_[static_cast<std::size_t>(p.served[b])];
          Heading ha = links_[static_cast<std::size_t>(ma.upstream)].heading;
          Heading hb = links_[static_cast<std::size_t>(mb.upstream)].heading;
          if (!movements_compatible(ha, ma.turn, hb, mb.turn))
            throw ConfigError("network: conflicting movements in one phase at node " +
                              std::to_string(it.node));
        }
      }
    }
    for (MovementId m : it.movements) {
      if (seen[static_cast<std::size_t>(m)] != 1)
        throw ConfigError("network: movement not covered exactly once by phases at node " +
                          std::to_string(it.node));
    }
  }
}

namespace {

struct GridFrame {
  int rows, cols;
  NetworkGraph* g;

  NodeId node_at(int r, int c) const { return static_cast<NodeId>(r * cols + c); }

  bool neighbor(int r, int c, Heading h, int* nr, int* nc) const {
    *nr = r;
    *nc = c;
    switch (h) {
      case Heading::kNorth: --*nr; break;
      case Heading::kSouth: ++*nr; break;
      case Heading::kEast: ++*nc; break;
      case Heading::kWest: --*nc; break;
    }
    return *nr >= 0 && *nr < rows && *nc >= 0 && *nc < cols;
  }
};

std::string node_name(int r, int c) {
  std::ostringstream os;
  os << "n" << r << "_" << c;
  return os.str();
}

}  // namespace

NetworkGraph build_grid(int rows, int cols, const LinkSpec& spec) {
  if (rows < 1 || cols < 1) throw ConfigError("build_grid: rows and cols must be >= 1");
  if (spec.length_m <= 0 || spec.lanes < 1 || spec.free_flow_kmh <= 0 ||
      spec.saturation_flow_vph <= 0 || spec.jam_spacing_m <= 0)
    throw ConfigError("build_grid: link template fields must be positive");

  NetworkGraph g;
  g.grid_rows_ = rows;
  g.grid_cols_ = cols;
  GridFrame f{rows, cols, &g};

  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      g.nodes_.push_back({f.node_at(r, c), NodeKind::kIntersection, r, c, node_name(r, c)});

  const int storage = storage_capacity_of(spec.length_m, spec.lanes, spec.jam_spacing_m);
  auto add_link = [&](NodeId from, NodeId to, Heading h, const std::string& name,
                      bool is_source, bool is_sink) {
    Link l;
    l.id = static_cast<LinkId>(g.links_.size());
    l.name = name;
    l.from = from;
    l.to = to;
    l.heading = h;
    l.length_m = spec.length_m;
    l.lanes = spec.lanes;
    l.free_flow_kmh = spec.free_flow_kmh;
    l.is_source = is_source;
    l.is_sink = is_sink;
    l.storage_capacity = is_sink ? std::numeric_limits<int>::max() : storage;
    g.links_.push_back(l);
    return l.id;
  };

  // Perimeter centroids, one per boundary approach: N/S sides indexed by
  // column, W/E sides indexed by row.
  auto add_centroid = [&](const std::string& name, int r, int c, Heading side) {
    NodeId id = static_cast<NodeId>(g.nodes_.size());
    g.nodes_.push_back({id, NodeKind::kCentroid, r, c, name});
    NodeId inter = f.node_at(r, c);
    Centroid cent;
    cent.node = id;
    cent.name = name;
    // The source link heads from the centroid into the grid, the sink link
    // heads outward; both run along the boundary side's axis.
    cent.source_link = add_link(id, inter, opposite(side), name + "->" + node_name(r, c),
                                true, false);
    cent.sink_link = add_link(inter, id, side, node_name(r, c) + "->" + name, false, true);
    g.centroids_.push_back(cent);
  };

  for (int c = 0; c < cols; ++c) add_centroid("N" + std::to_string(c), 0, c, Heading::kNorth);
  for (int c = 0; c < cols; ++c)
    add_centroid("S" + std::to_string(c), rows - 1, c, Heading::kSouth);
  for (int r = 0; r < rows; ++r) add_centroid("W" + std::to_string(r), r, 0, Heading::kWest);
  for (int r = 0; r < rows; ++r)
    add_centroid("E" + std::to_string(r), r, cols - 1, Heading::kEast);

  // Internal directed links, scan order by node then heading.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (Heading h : {Heading::kNorth, Heading::kEast, Heading::kSouth, Heading::kWest}) {
        int nr, nc;
        if (f.neighbor(r, c, h, &nr, &nc))
          add_link(f.node_at(r, c), f.node_at(nr, nc), h,
                   node_name(r, c) + "->" + node_name(nr, nc), false, false);
      }
    }
  }

  // Incoming/outgoing tables per intersection node.
  std::vector<std::vector<LinkId>> in_by_node(g.nodes_.size()), out_by_node(g.nodes_.size());
  for (const Link& l : g.links_) {
    out_by_node[static_cast<std::size_t>(l.from)].push_back(l.id);
    in_by_node[static_cast<std::size_t>(l.to)].push_back(l.id);
  }

  auto link_on_side = [&](const std::vector<LinkId>& candidates, Heading wanted_heading) {
    for (LinkId id : candidates)
      if (g.links_[static_cast<std::size_t>(id)].heading == wanted_heading) return id;
    return kNoLink;
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      NodeId node = f.node_at(r, c);
      Intersection it;
      it.node = node;

      // Approach sides in fixed N, E, S, W order; the incoming link on side s
      // travels in heading opposite(s).
      for (Heading side : {Heading::kNorth, Heading::kEast, Heading::kSouth, Heading::kWest}) {
        LinkId in = link_on_side(in_by_node[static_cast<std::size_t>(node)], opposite(side));
        if (in == kNoLink)
          throw InvariantViolation("build_grid: missing approach on side " +
                                   std::string(to_string(side)));
        it.incoming.push_back(in);
      }
      for (Heading h : {Heading::kNorth, Heading::kEast, Heading::kSouth, Heading::kWest}) {
        LinkId out = link_on_side(out_by_node[static_cast<std::size_t>(node)], h);
        if (out == kNoLink)
          throw InvariantViolation("build_grid: missing exit heading " +
                                   std::string(to_string(h)));
        it.outgoing.push_back(out);
      }

      Phase ns_tr{0, {}}, ns_l{1, {}}, ew_tr{2, {}}, ew_l{3, {}};
      for (LinkId in : it.incoming) {
        Heading travel = g.links_[static_cast<std::size_t>(in)].heading;
        for (Turn turn : {Turn::kLeft, Turn::kThrough, Turn::kRight}) {
          Heading out_heading = turn == Turn::kThrough ? travel
                                : turn == Turn::kRight ? right_of(travel)
                                                       : left_of(travel);
          LinkId out = link_on_side(out_by_node[static_cast<std::size_t>(node)], out_heading);
          Movement m;
          m.id = static_cast<MovementId>(g.movements_.size());
          m.node = node;
          m.upstream = in;
          m.downstream = out;
          m.turn = turn;
          m.saturation_flow_vph = spec.saturation_flow_vph;
          m.turn_ratio = turn == Turn::kThrough ? 0.5 : 0.25;
          g.movements_.push_back(m);
          it.movements.push_back(m.id);

          bool ns_axis = travel == Heading::kNorth || travel == Heading::kSouth;
          if (turn == Turn::kLeft)
            (ns_axis ? ns_l : ew_l).served.push_back(m.id);
          else
            (ns_axis ? ns_tr : ew_tr).served.push_back(m.id);
        }
      }
      it.phases = {ns_tr, ns_l, ew_tr, ew_l};

      it.is_isolated = true;
      for (LinkId out : it.outgoing)
        if (!g.links_[static_cast<std::size_t>(out)].is_sink) it.is_isolated = false;

      g.intersections_.push_back(std::move(it));
    }
  }

  g.rebuild_indexes();
  g.validate();
  return g;
}

std::string NetworkGraph::to_json_string(int indent) const {
  json j;
  j["schema"] = "mpsim-network-v1";
  j["grid"] = {{"rows", grid_rows_}, {"cols", grid_cols_}};
  j["nodes"] = json::array();
  for (const NodeInfo& n : nodes_)
    j["nodes"].push_back({{"id", n.id},
                          {"kind", n.kind == NodeKind::kIntersection ? "intersection" : "centroid"},
                          {"row", n.row},
                          {"col", n.col},
                          {"name", n.name}});
  j["links"] = json::array();
  for (const Link& l : links_)
    j["links"].push_back({{"id", l.id},
                          {"name", l.name},
                          {"from", l.from},
                          {"to", l.to},
                          {"heading", to_string(l.heading)},
                          {"length_m", l.length_m},
                          {"lanes", l.lanes},
                          {"free_flow_kmh", l.free_flow_kmh},
                          {"storage_capacity", l.storage_capacity},
                          {"is_source", l.is_source},
                          {"is_sink", l.is_sink}});
  j["movements"] = json::array();
  for (const Movement& m : movements_)
    j["movements"].push_back({{"id", m.id},
                              {"node", m.node},
                              {"upstream", m.upstream},
                              {"downstream", m.downstream},
                              {"turn", to_string(m.turn)},
                              {"saturation_flow_vph", m.saturation_flow_vph},
                              {"turn_ratio", m.turn_ratio}});
  j["intersections"] = json::array();
  for (const Intersection& it : intersections_) {
    json phases = json::array();
    for (const Phase& p : it.phases)
      phases.push_back({{"index", p.index}, {"served", p.served}});
    j["intersections"].push_back({{"node", it.node},
                                  {"incoming", it.incoming},
                                  {"outgoing", it.outgoing},
                                  {"movements", it.movements},
                                  {"phases", phases},
                                  {"is_isolated", it.is_isolated}});
  }
  j["centroids"] = json::array();
  for (const Centroid& c : centroids_)
    j["centroids"].push_back({{"node", c.node},
                              {"name", c.name},
                              {"source_link", c.source_link},
                              {"sink_link", c.sink_link}});
  return j.dump(indent);
}

namespace {

Heading heading_from_string(const std::string& s) {
  if (s == "north") return Heading::kNorth;
  if (s == "east") return Heading::kEast;
  if (s == "south") return Heading::kSouth;
  if (s == "west") return Heading::kWest;
  throw ConfigError("network json: bad heading '" + s + "'");
}

Turn turn_from_string(const std::string& s) {
  if (s == "left") return Turn::kLeft;
  if (s == "through") return Turn::kThrough;
  if (s == "right") return Turn::kRight;
  throw ConfigError("network json: bad turn '" + s + "'");
}

}  // namespace

NetworkGraph NetworkGraph::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("network json: parse failure: ") + e.what());
  }
  if (j.value("schema", "") != "mpsim-network-v1")
    throw ConfigError("network json: schema: expected mpsim-network-v1");

  NetworkGraph g;
  try {
    g.grid_rows_ = j.at("grid").at("rows").get<int>();
    g.grid_cols_ = j.at("grid").at("cols").get<int>();
    for (const json& n : j.at("nodes")) {
      NodeInfo info;
      info.id = n.at("id").get<NodeId>();
      info.kind = n.at("kind").get<std::string>() == "intersection" ? NodeKind::kIntersection
                                                                    : NodeKind::kCentroid;
      info.row = n.at("row").get<int>();
      info.col = n.at("col").get<int>();
      info.name = n.at("name").get<std::string>();
      g.nodes_.push_back(info);
    }
    for (const json& ln : j.at("links")) {
      Link l;
      l.id = ln.at("id").get<LinkId>();
      l.name = ln.at("name").get<std::string>();
      l.from = ln.at("from").get<NodeId>();
      l.to = ln.at("to").get<NodeId>();
      l.heading = heading_from_string(ln.at("heading").get<std::string>());
      l.length_m = ln.at("length_m").get<double>();
      l.lanes = ln.at("lanes").get<int>();
      l.free_flow_kmh = ln.at("free_flow_kmh").get<double>();
      l.storage_capacity = ln.at("storage_capacity").get<int>();
      l.is_source = ln.at("is_source").get<bool>();
      l.is_sink = ln.at("is_sink").get<bool>();
      if (l.id != static_cast<LinkId>(g.links_.size()))
        throw ConfigError("network json: links must be listed in id order");
      g.links_.push_back(l);
    }
    for (const json& mv : j.at("movements")) {
      Movement m;
      m.id = mv.at("id").get<MovementId>();
      m.node = mv.at("node").get<NodeId>();
      m.upstream = mv.at("upstream").get<LinkId>();
      m.downstream = mv.at("downstream").get<LinkId>();
      m.turn = turn_from_string(mv.at("turn").get<std::string>());
      m.saturation_flow_vph = mv.at("saturation_flow_vph").get<double>();
      m.turn_ratio = mv.at("turn_ratio").get<double>();
      if (m.id != static_cast<MovementId>(g.movements_.size()))
        throw ConfigError("network json: movements must be listed in id order");
      g.movements_.push_back(m);
    }
    for (const json& in : j.at("intersections")) {
      Intersection it;
      it.node = in.at("node").get<NodeId>();
      it.incoming = in.at("incoming").get<std::vector<LinkId>>();
      it.outgoing = in.at("outgoing").get<std::vector<LinkId>>();
      it.movements = in.at("movements").get<std::vector<MovementId>>();
      for (const json& ph : in.at("phases")) {
        Phase p;
        p.index = ph.at("index").get<int>();
        p.served = ph.at("served").get<std::vector<MovementId>>();
        it.phases.push_back(p);
      }
      it.is_isolated = in.at("is_isolated").get<bool>();
      g.intersections_.push_back(std::move(it));
    }
    for (const json& ce : j.at("centroids")) {
      Centroid c;
      c.node = ce.at("node").get<NodeId>();
      c.name = ce.at("name").get<std::string>();
      c.source_link = ce.at("source_link").get<LinkId>();
      c.sink_link = ce.at("sink_link").get<LinkId>();
      g.centroids_.push_back(c);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("network json: ") + e.what());
  }
  g.rebuild_indexes();
  g.validate();
  return g;
}

}  // namespace mpsim

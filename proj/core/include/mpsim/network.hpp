#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpsim {

using NodeId = std::int32_t;
using LinkId = std::int32_t;
using MovementId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr LinkId kNoLink = -1;

// Bad user-supplied configuration: reported with a field path, exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal consistency failure mid-run: aborts the run, exit code 3.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// A vehicle's stored route disagrees with the network topology.
struct RouteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Direction of travel. Rows grow southward, columns grow eastward.
enum class Heading : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

constexpr Heading right_of(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 1) % 4);
}
constexpr Heading left_of(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 3) % 4);
}
constexpr Heading opposite(Heading h) {
  return static_cast<Heading>((static_cast<int>(h) + 2) % 4);
}
const char* to_string(Heading h);

enum class Turn : int { kLeft = 0, kThrough = 1, kRight = 2 };
const char* to_string(Turn t);

struct Link {
  LinkId id = kNoLink;
  std::string name;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  Heading heading = Heading::kNorth;
  double length_m = 0;
  int lanes = 0;
  double free_flow_kmh = 0;
  int storage_capacity = 0;  // vehicles; unbounded for sinks
  bool is_source = false;    // enters the network from a centroid
  bool is_sink = false;      // leaves the network into a centroid

  double free_flow_time_s() const { return length_m / (free_flow_kmh / 3.6); }
  // Whole simulation steps needed to traverse at free flow, at least one.
  int travel_steps(double dt_s) const;
};

struct Movement {
  MovementId id = -1;
  NodeId node = kNoNode;
  LinkId upstream = kNoLink;
  LinkId downstream = kNoLink;
  Turn turn = Turn::kThrough;
  double saturation_flow_vph = 0;  // nominal service rate c(l,m)
  double turn_ratio = 0;           // default estimate; sums to 1 over each upstream link
};

struct Phase {
  int index = 0;
  std::vector<MovementId> served;
};

struct Intersection {
  NodeId node = kNoNode;
  std::vector<LinkId> incoming;
  std::vector<LinkId> outgoing;
  // Ordered by approach side (N, E, S, W) then turn (L, T, R); observation
  // vectors and controller views share this ordering.
  std::vector<MovementId> movements;
  std::vector<Phase> phases;
  bool is_isolated = false;  // every outgoing link exits the network
};

// Perimeter origin/destination zone. Owns one entry link and one exit link.
struct Centroid {
  NodeId node = kNoNode;
  std::string name;
  LinkId source_link = kNoLink;
  LinkId sink_link = kNoLink;
};

enum class NodeKind { kIntersection, kCentroid };

struct NodeInfo {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::kIntersection;
  int row = -1;  // grid coordinates for intersections; centroid anchor otherwise
  int col = -1;
  std::string name;
};

struct LinkSpec {
  double length_m = 200.0;
  int lanes = 3;
  double free_flow_kmh = 50.0;
  double saturation_flow_vph = 1800.0;
  double jam_spacing_m = 7.0;
};

// floor(length * lanes / jam_spacing), clamped to at least 1.
int storage_capacity_of(double length_m, int lanes, double jam_spacing_m);

// True when two movements, described by approach heading and turn, may be
// served in the same phase of the protected four-phase scheme.
bool movements_compatible(Heading a_heading, Turn a_turn, Heading b_heading,
                          Turn b_turn);

class NetworkGraph {
 public:
  const std::vector<NodeInfo>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Movement>& movements() const { return movements_; }
  const std::vector<Intersection>& intersections() const { return intersections_; }
  const std::vector<Centroid>& centroids() const { return centroids_; }

  const Link& link(LinkId id) const { return links_.at(static_cast<std::size_t>(id)); }
  const Movement& movement(MovementId id) const {
    return movements_.at(static_cast<std::size_t>(id));
  }

  // Movements leaving a link, i.e. the (l, m) pairs with upstream == l.
  const std::vector<MovementId>& movements_from(LinkId l) const {
    return movements_from_.at(static_cast<std::size_t>(l));
  }
  // nullptr when no such movement exists.
  const Movement* find_movement(LinkId upstream, LinkId downstream) const;
  // Intersection index by node id, -1 when the node is not signalized.
  int intersection_index(NodeId node) const;

  int grid_rows() const { return grid_rows_; }
  int grid_cols() const { return grid_cols_; }
  NodeId grid_node(int row, int col) const;
  // Centroid lookup by name ("N0", "W3", ...); throws ConfigError if absent.
  const Centroid& centroid_by_name(const std::string& name) const;

  std::vector<LinkId> source_links() const;
  std::vector<LinkId> sink_links() const;

  void validate() const;

  std::string to_json_string(int indent = 2) const;
  static NetworkGraph from_json_string(const std::string& text);

 private:
  friend NetworkGraph build_grid(int rows, int cols, const LinkSpec& spec);

  void rebuild_indexes();

  std::vector<NodeInfo> nodes_;
  std::vector<Link> links_;
  std::vector<Movement> movements_;
  std::vector<Intersection> intersections_;
  std::vector<Centroid> centroids_;
  std::vector<std::vector<MovementId>> movements_from_;
  std::vector<int> intersection_index_;  // by node id
  int grid_rows_ = 0;
  int grid_cols_ = 0;
};

// rows x cols lattice of signalized intersections with bidirectional internal
// links and one source/sink centroid pair on every perimeter approach. Every
// intersection gets twelve movements grouped into the four-phase scheme
// (NS through+right, NS left, EW through+right, EW left).
NetworkGraph build_grid(int rows, int cols, const LinkSpec& spec = {});

}  // namespace mpsim

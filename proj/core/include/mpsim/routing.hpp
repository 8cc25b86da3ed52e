#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "mpsim/network.hpp"
#include "mpsim/rng.hpp"

namespace mpsim {

struct RoutePath {
  std::vector<LinkId> links;  // source link ... sink link
  double cost_s = 0;          // summed free-flow times
};

// Loop-free k-shortest-path router over the movement graph (so U-turn bans
// are respected), with logit sampling over the alternatives:
// P(path i) ~ exp(-theta * cost_i). Path sets are cached per OD pair.
class Router {
 public:
  Router(const NetworkGraph& net, int k, double theta);

  // Ranked alternatives between a source link and a sink link, best first,
  // every path node-simple. Throws ConfigError when no path exists.
  const std::vector<RoutePath>& paths(LinkId origin_source, LinkId destination_sink);

  std::vector<LinkId> sample(LinkId origin_source, LinkId destination_sink, Rng& rng);

  // Deterministic shortest path threading the given nodes in order; used for
  // fixed transit alignments.
  std::vector<LinkId> shortest_via(LinkId origin_source, const std::vector<NodeId>& via,
                                   LinkId destination_sink) const;

  int k() const { return k_; }
  double theta() const { return theta_; }

 private:
  struct Dijkstra {
    std::vector<LinkId> links;
    double cost = -1;  // negative: unreachable
  };
  // Shortest link path from `start` until `goal_link` (if >= 0) or until any
  // link entering `goal_node`. Links in `banned_links` and links entering
  // nodes in `banned_nodes` are unavailable.
  Dijkstra shortest(LinkId start, LinkId goal_link, NodeId goal_node,
                    const std::vector<char>& banned_links,
                    const std::vector<char>& banned_nodes) const;

  const NetworkGraph* net_;
  int k_;
  double theta_;
  std::vector<double> link_cost_;
  std::unordered_map<std::uint64_t, std::vector<RoutePath>> cache_;
};

}  // namespace mpsim

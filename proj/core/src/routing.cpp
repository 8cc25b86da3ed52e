#include "mpsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

namespace mpsim {

Router::Router(const NetworkGraph& net, int k, double theta)
    : net_(&net), k_(k), theta_(theta) {
  if (k < 1) throw ConfigError("routing.k must be >= 1");
  if (theta < 0) throw ConfigError("routing.theta must be >= 0");
  link_cost_.reserve(net.links().size());
  for (const Link& l : net.links()) link_cost_.push_back(l.free_flow_time_s());
}

Router::Dijkstra Router::shortest(LinkId start, LinkId goal_link, NodeId goal_node,
                                  const std::vector<char>& banned_links,
                                  const std::vector<char>& banned_nodes) const {
  const std::size_t n = net_->links().size();
  std::vector<double> dist(n, -1);
  std::vector<LinkId> prev(n, kNoLink);

  using Item = std::pair<double, LinkId>;  // (cost, link); link id breaks ties
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

  if (!banned_links[static_cast<std::size_t>(start)]) {
    dist[static_cast<std::size_t>(start)] = link_cost_[static_cast<std::size_t>(start)];
    heap.push({dist[static_cast<std::size_t>(start)], start});
  }

  LinkId reached = kNoLink;
  while (!heap.empty()) {
    auto [cost, l] = heap.top();
    heap.pop();
    if (cost > dist[static_cast<std::size_t>(l)]) continue;
    if (l == goal_link || (goal_link == kNoLink && net_->link(l).to == goal_node)) {
      reached = l;
      break;
    }
    for (MovementId mid : net_->movements_from(l)) {
      LinkId next = net_->movement(mid).downstream;
      if (banned_links[static_cast<std::size_t>(next)]) continue;
      if (banned_nodes[static_cast<std::size_t>(net_->link(next).to)] && next != goal_link)
        continue;
      double cand = cost + link_cost_[static_cast<std::size_t>(next)];
      if (dist[static_cast<std::size_t>(next)] < 0 ||
          cand < dist[static_cast<std::size_t>(next)]) {
        dist[static_cast<std::size_t>(next)] = cand;
        prev[static_cast<std::size_t>(next)] = l;
        heap.push({cand, next});
      }
    }
  }

  Dijkstra out;
  if (reached == kNoLink) return out;
  out.cost = dist[static_cast<std::size_t>(reached)];
  for (LinkId l = reached; l != kNoLink; l = prev[static_cast<std::size_t>(l)])
    out.links.push_back(l);
  std::reverse(out.links.begin(), out.links.end());
  return out;
}

const std::vector<RoutePath>& Router::paths(LinkId origin, LinkId destination) {
  std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(origin)) << 32) |
                      static_cast<std::uint32_t>(destination);
  auto hit = cache_.find(key);
  if (hit != cache_.end()) return hit->second;

  if (!net_->link(origin).is_source)
    throw ConfigError("router: origin must be a source link");
  if (!net_->link(destination).is_sink)
    throw ConfigError("router: destination must be a sink link");

  const std::size_t n_links = net_->links().size();
  const std::size_t n_nodes = net_->nodes().size();
  std::vector<char> no_links(n_links, 0), no_nodes(n_nodes, 0);

  std::vector<RoutePath> found;
  Dijkstra first = shortest(origin, destination, kNoNode, no_links, no_nodes);
  if (first.cost < 0)
    throw ConfigError("router: no path from " + net_->link(origin).name + " to " +
                      net_->link(destination).name);
  found.push_back({first.links, first.cost});

  // Yen's algorithm over the movement graph. Spur exploration bans nodes the
  // root prefix already visited, which keeps every candidate node-simple.
  auto path_less = [](const RoutePath& a, const RoutePath& b) {
    if (a.cost_s != b.cost_s) return a.cost_s < b.cost_s;
    return a.links < b.links;
  };
  std::set<std::vector<LinkId>> known{first.links};
  std::vector<RoutePath> candidates;

  while (static_cast<int>(found.size()) < k_) {
    const RoutePath& base = found.back();
    for (std::size_t i = 0; i + 1 < base.links.size(); ++i) {
      LinkId spur = base.links[i];
      std::vector<LinkId> root(base.links.begin(), base.links.begin() + static_cast<long>(i) + 1);
      double root_cost = 0;
      for (std::size_t r = 0; r < i; ++r)
        root_cost += link_cost_[static_cast<std::size_t>(base.links[r])];

      std::vector<char> banned_links(n_links, 0), banned_nodes(n_nodes, 0);
      for (const RoutePath& p : found) {
        if (p.links.size() > i + 1 &&
            std::equal(root.begin(), root.end(), p.links.begin()))
          banned_links[static_cast<std::size_t>(p.links[i + 1])] = 1;
      }
      for (const RoutePath& p : candidates) {
        if (p.links.size() > i + 1 &&
            std::equal(root.begin(), root.end(), p.links.begin()))
          banned_links[static_cast<std::size_t>(p.links[i + 1])] = 1;
      }
      for (std::size_t r = 0; r < i; ++r) {
        banned_nodes[static_cast<std::size_t>(net_->link(root[r]).from)] = 1;
        banned_nodes[static_cast<std::size_t>(net_->link(root[r]).to)] = 1;
      }
      banned_nodes[static_cast<std::size_t>(net_->link(spur).from)] = 1;

      Dijkstra sp = shortest(spur, destination, kNoNode, banned_links, banned_nodes);
      if (sp.cost < 0) continue;

      RoutePath cand;
      cand.links = root;
      cand.links.pop_back();
      cand.links.insert(cand.links.end(), sp.links.begin(), sp.links.end());
      cand.cost_s = root_cost + sp.cost;
      if (known.insert(cand.links).second) candidates.push_back(std::move(cand));
    }
    if (candidates.empty()) break;
    auto best = std::min_element(candidates.begin(), candidates.end(), path_less);
    found.push_back(*best);
    candidates.erase(best);
  }

  return cache_.emplace(key, std::move(found)).first->second;
}

std::vector<LinkId> Router::sample(LinkId origin, LinkId destination, Rng& rng) {
  const std::vector<RoutePath>& alts = paths(origin, destination);
  if (alts.size() == 1) {
    rng.uniform01();  // keep the draw count independent of the alternative count
    return alts.front().links;
  }
  double min_cost = alts.front().cost_s;
  std::vector<double> w(alts.size());
  double total = 0;
  for (std::size_t i = 0; i < alts.size(); ++i) {
    w[i] = std::exp(-theta_ * (alts[i].cost_s - min_cost));
    total += w[i];
  }
  double u = rng.uniform01() * total;
  double acc = 0;
  for (std::size_t i = 0; i < alts.size(); ++i) {
    acc += w[i];
    if (u < acc) return alts[i].links;
  }
  return alts.back().links;
}

std::vector<LinkId> Router::shortest_via(LinkId origin, const std::vector<NodeId>& via,
                                         LinkId destination) const {
  const std::size_t n_links = net_->links().size();
  const std::size_t n_nodes = net_->nodes().size();
  std::vector<char> no_links(n_links, 0), no_nodes(n_nodes, 0);

  std::vector<LinkId> full;
  LinkId at = origin;
  for (NodeId stop : via) {
    Dijkstra seg = shortest(at, kNoLink, stop, no_links, no_nodes);
    if (seg.cost < 0)
      throw ConfigError("router: no path reaching via node " + std::to_string(stop));
    if (!full.empty()) seg.links.erase(seg.links.begin());  // `at` already present
    full.insert(full.end(), seg.links.begin(), seg.links.end());
    at = full.back();
  }
  Dijkstra last = shortest(at, destination, kNoNode, no_links, no_nodes);
  if (last.cost < 0)
    throw ConfigError("router: no path to destination " + net_->link(destination).name);
  if (!full.empty()) last.links.erase(last.links.begin());
  full.insert(full.end(), last.links.begin(), last.links.end());
  return full;
}

}  // namespace mpsim

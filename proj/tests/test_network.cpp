#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "mpsim/network.hpp"

using namespace mpsim;

TEST_CASE("storage capacity floors and never drops below one vehicle") {
  CHECK(storage_capacity_of(200.0, 3, 7.0) == 85);
  CHECK(storage_capacity_of(5.0, 1, 7.0) == 1);
  CHECK(storage_capacity_of(14.0, 1, 7.0) == 2);
  CHECK_THROWS_AS(storage_capacity_of(-1.0, 3, 7.0), ConfigError);
  CHECK_THROWS_AS(storage_capacity_of(200.0, 0, 7.0), ConfigError);
}

TEST_CASE("free-flow traversal rounds up to whole steps, at least one") {
  Link l;
  l.length_m = 200;
  l.free_flow_kmh = 50;
  CHECK(l.free_flow_time_s() == doctest::Approx(14.4));
  CHECK(l.travel_steps(1.0) == 15);
  CHECK(l.travel_steps(5.0) == 3);
  l.length_m = 1;
  CHECK(l.travel_steps(1.0) == 1);
}

TEST_CASE("protected phase compatibility pairs opposing flows only") {
  using H = Heading;
  using T = Turn;
  // Same approach: always jointly servable.
  CHECK(movements_compatible(H::kSouth, T::kThrough, H::kSouth, T::kRight));
  // Opposing throughs and the paired rights share a phase.
  CHECK(movements_compatible(H::kSouth, T::kThrough, H::kNorth, T::kThrough));
  CHECK(movements_compatible(H::kSouth, T::kThrough, H::kNorth, T::kRight));
  // Opposing lefts share the protected left phase.
  CHECK(movements_compatible(H::kSouth, T::kLeft, H::kNorth, T::kLeft));
  // A left conflicts with the opposing through.
  CHECK_FALSE(movements_compatible(H::kSouth, T::kLeft, H::kNorth, T::kThrough));
  // Cross traffic never shares a phase.
  CHECK_FALSE(movements_compatible(H::kSouth, T::kThrough, H::kEast, T::kThrough));
  CHECK_FALSE(movements_compatible(H::kSouth, T::kLeft, H::kWest, T::kLeft));
  CHECK_FALSE(movements_compatible(H::kSouth, T::kRight, H::kEast, T::kThrough));
}

TEST_CASE("a 2x2 grid has the documented element counts") {
  NetworkGraph net = build_grid(2, 2);
  CHECK(net.intersections().size() == 4);
  CHECK(net.centroids().size() == 8);
  CHECK(net.nodes().size() == 12);
  // 4 undirected internal edges doubled, plus a source and a sink per
  // perimeter approach.
  int internal = 0;
  int boundary = 0;
  for (const Link& l : net.links()) {
    if (l.is_source || l.is_sink)
      ++boundary;
    else
      ++internal;
  }
  CHECK(internal == 8);
  CHECK(boundary == 16);
  CHECK(net.links().size() == 24);
  CHECK(net.movements().size() == 4 * 12);
  for (const Intersection& it : net.intersections()) {
    CHECK(it.movements.size() == 12);
    CHECK(it.phases.size() == 4);
    CHECK(it.incoming.size() == 4);
    CHECK(it.outgoing.size() == 4);
  }
}

TEST_CASE("grid node and centroid lookups resolve by position and name") {
  NetworkGraph net = build_grid(3, 4);
  CHECK(net.grid_node(0, 0) == 0);
  CHECK(net.grid_node(2, 3) == 2 * 4 + 3);
  CHECK_THROWS_AS(net.grid_node(3, 0), ConfigError);
  const NodeInfo& n = net.nodes().at(static_cast<std::size_t>(net.grid_node(1, 2)));
  CHECK(n.name == "n1_2");
  CHECK(n.kind == NodeKind::kIntersection);

  // One centroid pair per perimeter approach: N/S by column, W/E by row.
  for (int c = 0; c < 4; ++c) {
    CHECK(net.centroid_by_name("N" + std::to_string(c)).source_link != kNoLink);
    CHECK(net.centroid_by_name("S" + std::to_string(c)).sink_link != kNoLink);
  }
  for (int r = 0; r < 3; ++r) {
    CHECK(net.centroid_by_name("W" + std::to_string(r)).source_link != kNoLink);
    CHECK(net.centroid_by_name("E" + std::to_string(r)).source_link != kNoLink);
  }
  CHECK_THROWS_AS(net.centroid_by_name("N9"), ConfigError);
  CHECK(net.source_links().size() == 2 * (3 + 4));
  CHECK(net.sink_links().size() == 2 * (3 + 4));
}

TEST_CASE("movements are grouped per approach and cover each phase once") {
  NetworkGraph net = build_grid(2, 2);
  const Intersection& it = net.intersections().front();

  // Three consecutive movements per approach, ordered left, through, right.
  for (std::size_t i = 0; i < it.movements.size(); i += 3) {
    const Movement& a = net.movement(it.movements[i]);
    const Movement& b = net.movement(it.movements[i + 1]);
    const Movement& c = net.movement(it.movements[i + 2]);
    CHECK(a.upstream == b.upstream);
    CHECK(b.upstream == c.upstream);
    CHECK(a.turn == Turn::kLeft);
    CHECK(b.turn == Turn::kThrough);
    CHECK(c.turn == Turn::kRight);
  }

  // Every movement appears in exactly one phase.
  std::map<MovementId, int> covered;
  for (const Phase& p : it.phases)
    for (MovementId m : p.served) ++covered[m];
  CHECK(covered.size() == 12);
  for (const auto& [m, count] : covered) CHECK(count == 1);

  // Phase layout: axis through+right phases serve four movements, protected
  // left phases two.
  CHECK(it.phases[0].served.size() == 4);
  CHECK(it.phases[1].served.size() == 2);
  CHECK(it.phases[2].served.size() == 4);
  CHECK(it.phases[3].served.size() == 2);
}

TEST_CASE("default turn ratios sum to one over each upstream link") {
  NetworkGraph net = build_grid(2, 3);
  std::map<LinkId, double> totals;
  for (const Movement& m : net.movements()) totals[m.upstream] += m.turn_ratio;
  for (const auto& [link, total] : totals) {
    INFO("link ", link);
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("movement and intersection indexes answer lookups") {
  NetworkGraph net = build_grid(2, 2);
  const Movement& m = net.movements().front();
  const Movement* found = net.find_movement(m.upstream, m.downstream);
  REQUIRE(found != nullptr);
  CHECK(found->id == m.id);
  CHECK(net.find_movement(m.upstream, m.upstream) == nullptr);
  CHECK(net.intersection_index(net.intersections().front().node) == 0);
  const Centroid& c = net.centroids().front();
  CHECK(net.intersection_index(c.node) == -1);
  for (MovementId mid : net.movements_from(m.upstream)) {
    CHECK(net.movement(mid).upstream == m.upstream);
  }
}

TEST_CASE("a single intersection with sink exits is isolated") {
  NetworkGraph one = build_grid(1, 1);
  REQUIRE(one.intersections().size() == 1);
  CHECK(one.intersections().front().is_isolated);

  NetworkGraph four = build_grid(2, 2);
  for (const Intersection& it : four.intersections()) CHECK_FALSE(it.is_isolated);
}

TEST_CASE("grid construction rejects non-positive dimensions") {
  CHECK_THROWS_AS(build_grid(0, 4), ConfigError);
  CHECK_THROWS_AS(build_grid(4, -1), ConfigError);
}

TEST_CASE("network serialization round-trips byte for byte") {
  NetworkGraph net = build_grid(2, 3);
  std::string text = net.to_json_string();
  NetworkGraph copy = NetworkGraph::from_json_string(text);
  CHECK(copy.links().size() == net.links().size());
  CHECK(copy.movements().size() == net.movements().size());
  CHECK(copy.intersections().size() == net.intersections().size());
  CHECK(copy.grid_rows() == 2);
  CHECK(copy.grid_cols() == 3);
  copy.validate();
  CHECK(copy.to_json_string() == text);

  CHECK_THROWS_AS(NetworkGraph::from_json_string("{\"schema\":\"other\"}"), ConfigError);
  CHECK_THROWS_AS(NetworkGraph::from_json_string("not json"), ConfigError);
}

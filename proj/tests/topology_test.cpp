#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "pcosync/topology.hpp"

using namespace pcosync;

namespace {

// Places the nodes explicitly and measures Euclidean distances; independent
// of the chord formula used by build_circle_deployment.
std::vector<NodeId> neighbors_by_geometry(std::size_t n, double diameter, double range, NodeId i) {
  const double r = diameter / 2.0;
  auto pos = [&](NodeId k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    return std::pair{r * std::cos(a), r * std::sin(a)};
  };
  std::vector<NodeId> out;
  const auto [xi, yi] = pos(i);
  for (NodeId j = 0; j < n; ++j) {
    if (j == i) continue;
    const auto [xj, yj] = pos(j);
    if (std::hypot(xi - xj, yi - yj) < range) out.push_back(j);
  }
  return out;
}

}  // namespace

TEST(CircleDeployment, SimulationSetupHasDegree20) {
  const auto t = build_circle_deployment(24, 40.0, 39.0);
  EXPECT_EQ(t.size(), 24u);
  EXPECT_EQ(t.network_degree(), 20u);
  for (NodeId i = 0; i < 24; ++i) {
    EXPECT_EQ(t.in_degree(i), 20u);
    EXPECT_EQ(t.out_degree(i), 20u);
  }
}

TEST(CircleDeployment, NodeZeroNeighborsMatchGeometry) {
  const auto t = build_circle_deployment(24, 40.0, 39.0);
  std::vector<NodeId> expected;
  for (NodeId j = 1; j <= 10; ++j) expected.push_back(j);
  for (NodeId j = 14; j <= 23; ++j) expected.push_back(j);
  EXPECT_EQ(t.out_neighbors(0), expected);
  EXPECT_EQ(neighbors_by_geometry(24, 40.0, 39.0, 0), expected);
  for (NodeId i = 0; i < 24; ++i) {
    EXPECT_EQ(t.out_neighbors(i), neighbors_by_geometry(24, 40.0, 39.0, i));
  }
}

TEST(CircleDeployment, RangeBeyondDiameterIsComplete) {
  const auto t = build_circle_deployment(4, 40.0, 41.0);
  EXPECT_EQ(t.network_degree(), 3u);
}

TEST(CircleDeployment, BoundaryIsStrict) {
  // Opposite nodes of a 2-node circle sit exactly one diameter apart.
  EXPECT_EQ(build_circle_deployment(2, 40.0, 40.0).network_degree(), 0u);
  EXPECT_EQ(build_circle_deployment(2, 40.0, 40.0001).network_degree(), 1u);
}

TEST(CircleDeployment, RejectsBadInput) {
  EXPECT_THROW(build_circle_deployment(1, 40.0, 39.0), std::invalid_argument);
  EXPECT_THROW(build_circle_deployment(5, 0.0, 39.0), std::invalid_argument);
  EXPECT_THROW(build_circle_deployment(5, 40.0, -1.0), std::invalid_argument);
}

TEST(OutNeighbors, Examples) {
  EXPECT_EQ(complete_topology(3).out_neighbors(0), (std::vector<NodeId>{1, 2}));
  Topology single_edge({{1}, {}});
  EXPECT_TRUE(single_edge.out_neighbors(1).empty());
  EXPECT_THROW(single_edge.out_neighbors(2), std::out_of_range);
}

TEST(OutNeighbors, SortedAscendingRegardlessOfInputOrder) {
  Topology t({{3, 1, 2}, {0}, {0}, {0}});
  EXPECT_EQ(t.out_neighbors(0), (std::vector<NodeId>{1, 2, 3}));
}

TEST(LoadTopology, Explicit) {
  auto t = load_topology(ExplicitDescription{{{1, 2}, {0, 2}, {0, 1}}});
  EXPECT_EQ(t.network_degree(), 2u);
  EXPECT_EQ(load_topology(CircleDescription{24, 40.0, 39.0}).network_degree(), 20u);
}

TEST(LoadTopology, Errors) {
  EXPECT_THROW(load_topology(ExplicitDescription{{{1}, {0}, {2}}}), std::invalid_argument);
  EXPECT_THROW(load_topology(ExplicitDescription{{{1, 1}, {0}}}), std::invalid_argument);
  EXPECT_THROW(load_topology(ExplicitDescription{{{5}, {0}}}), std::invalid_argument);
}

TEST(Degree, MinOfInAndOut) {
  // Node 0: out {1,2}, in {1,2,3}.
  Topology t({{1, 2}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}});
  EXPECT_EQ(t.in_degree(0), 3u);
  EXPECT_EQ(t.out_degree(0), 2u);
  EXPECT_EQ(t.degree(0), 2u);
  EXPECT_EQ(t.network_degree(), 2u);
}

TEST(ValidateConditions, SimulationExamples) {
  const auto t = build_circle_deployment(24, 40.0, 39.0);
  const auto m1 = validate_conditions(t, MechanismKind::Mechanism1, 3);
  EXPECT_TRUE(m1.degree_ok);
  EXPECT_EQ(m1.degree_bound, 16);
  EXPECT_TRUE(m1.attacker_bound_ok);
  EXPECT_EQ(m1.max_allowed_attackers, 3);

  const auto m2 = validate_conditions(t, MechanismKind::Mechanism2, 3);
  EXPECT_TRUE(m2.degree_ok);
  EXPECT_FALSE(m2.attacker_bound_ok);
  EXPECT_EQ(m2.max_allowed_attackers, 2);

  const auto m2_free = validate_conditions(t, MechanismKind::Mechanism2, 0);
  EXPECT_TRUE(m2_free.degree_ok);
  EXPECT_EQ(m2_free.degree_bound, 18);
  EXPECT_TRUE(m2_free.attacker_bound_ok);
}

TEST(ValidateConditions, AttackerBoundIsTight) {
  for (std::size_t n = 4; n <= 30; ++n) {
    for (double range : {20.0, 30.0, 35.0, 38.0, 39.5, 41.0}) {
      const auto t = build_circle_deployment(n, 40.0, range);
      for (auto kind : {MechanismKind::Mechanism1, MechanismKind::Mechanism2}) {
        const auto probe = validate_conditions(t, kind, 0);
        const auto allowed = probe.max_allowed_attackers;
        if (allowed >= 0 && static_cast<std::size_t>(allowed) < n) {
          EXPECT_TRUE(validate_conditions(t, kind, allowed).attacker_bound_ok);
        }
        if (allowed + 1 >= 0 && static_cast<std::size_t>(allowed + 1) < n) {
          EXPECT_FALSE(validate_conditions(t, kind, allowed + 1).attacker_bound_ok);
        }
      }
    }
  }
}

TEST(ValidateConditions, Errors) {
  const auto t = complete_topology(5);
  EXPECT_THROW(validate_conditions(t, MechanismKind::Conventional, 0), std::invalid_argument);
  EXPECT_THROW(validate_conditions(t, MechanismKind::Mechanism1, 5), std::invalid_argument);
}

TEST(StrongConnectivity, DenseGraphsAreStronglyConnected) {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 4 + rng() % 20;
    const std::size_t min_out = 2 * n / 3 + 1;
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId i = 0; i < n; ++i) {
      std::vector<NodeId> others;
      for (NodeId j = 0; j < n; ++j)
        if (j != i) others.push_back(j);
      std::shuffle(others.begin(), others.end(), rng);
      const std::size_t k = min_out + rng() % (n - min_out);
      adj[i].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(std::min(k, n - 1)));
    }
    Topology t(adj);
    if (t.network_degree() > 2 * n / 3) {
      ++checked;
      EXPECT_TRUE(t.strongly_connected());
    }
  }
  EXPECT_GT(checked, 50);
  EXPECT_TRUE(build_circle_deployment(24, 40.0, 39.0).strongly_connected());
  EXPECT_FALSE(Topology({{1}, {}}).strongly_connected());
}

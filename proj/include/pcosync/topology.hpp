#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pcosync/core.hpp"

namespace pcosync {

/**
 * Directed communication graph. An edge i -> j means j hears i's pulses.
 * Out-neighbor lists are kept sorted ascending; the engine relies on that
 * order for deterministic cascades.
 */
class Topology {
 public:
  Topology() = default;

  /// Throws std::invalid_argument on self-edges, duplicate edges or bad ids.
  explicit Topology(std::vector<std::vector<NodeId>> out_adjacency)
      : out_(std::move(out_adjacency)), in_degree_(out_.size(), 0) {
    const std::size_t n = out_.size();
    for (NodeId i = 0; i < n; ++i) {
      auto& list = out_[i];
      for (NodeId j : list) {
        if (j >= n) {
          throw std::invalid_argument("edge " + std::to_string(i) + "->" + std::to_string(j) +
                                      ": index out of range");
        }
        if (j == i) {
          throw std::invalid_argument("self-edge at node " + std::to_string(i));
        }
      }
      std::sort(list.begin(), list.end());
      if (std::adjacent_find(list.begin(), list.end()) != list.end()) {
        throw std::invalid_argument("duplicate edge out of node " + std::to_string(i));
      }
      for (NodeId j : list) ++in_degree_[j];
    }
  }

  std::size_t size() const { return out_.size(); }

  const std::vector<NodeId>& out_neighbors(NodeId i) const {
    check(i);
    return out_[i];
  }

  std::size_t out_degree(NodeId i) const { return out_neighbors(i).size(); }

  std::size_t in_degree(NodeId i) const {
    check(i);
    return in_degree_[i];
  }

  /// d_i = min(indegree, outdegree).
  std::size_t degree(NodeId i) const { return std::min(in_degree(i), out_degree(i)); }

  /// d = min_i d_i; zero for an empty graph.
  std::size_t network_degree() const {
    if (out_.empty()) return 0;
    std::size_t d = degree(0);
    for (NodeId i = 1; i < size(); ++i) d = std::min(d, degree(i));
    return d;
  }

  bool has_edge(NodeId from, NodeId to) const {
    const auto& list = out_neighbors(from);
    return std::binary_search(list.begin(), list.end(), to);
  }

  const std::vector<std::vector<NodeId>>& adjacency() const { return out_; }

  /// Every node reaches every other node along directed edges.
  bool strongly_connected() const {
    const std::size_t n = size();
    if (n <= 1) return true;
    std::vector<std::vector<NodeId>> reversed(n);
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j : out_[i]) reversed[j].push_back(i);
    return reaches_all(out_) && reaches_all(reversed);
  }

 private:
  void check(NodeId i) const {
    if (i >= out_.size()) {
      throw std::out_of_range("node id " + std::to_string(i) + " outside [0, " +
                              std::to_string(out_.size()) + ")");
    }
  }

  static bool reaches_all(const std::vector<std::vector<NodeId>>& adj) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (NodeId w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == adj.size();
  }

  std::vector<std::vector<NodeId>> out_;
  std::vector<std::size_t> in_degree_;
};

/**
 * Nodes evenly spaced on a circle (node 0 at angle 0, counterclockwise).
 * Nodes i and j are linked both ways iff their chord length
 * diameter * sin(pi * delta / n) is strictly below comm_range, where delta is
 * the circular index distance.
 */
inline Topology build_circle_deployment(std::size_t n, double diameter, double comm_range) {
  if (n < 2) throw std::invalid_argument("circle deployment needs at least 2 nodes");
  if (!(diameter > 0.0) || !(comm_range > 0.0)) {
    throw std::invalid_argument("diameter and comm_range must be positive");
  }
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t raw = i > j ? i - j : j - i;
      const std::size_t delta = std::min(raw, n - raw);
      const double chord =
          diameter * std::sin(std::numbers::pi * static_cast<double>(delta) / static_cast<double>(n));
      if (chord < comm_range) adj[i].push_back(j);
    }
  }
  return Topology(std::move(adj));
}

inline Topology complete_topology(std::size_t n) {
  std::vector<std::vector<NodeId>> adj(n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (i != j) adj[i].push_back(j);
  return Topology(std::move(adj));
}

struct CircleDescription {
  std::size_t n = 0;
  double diameter = 0.0;
  double range = 0.0;
  friend bool operator==(const CircleDescription&, const CircleDescription&) = default;
};

struct ExplicitDescription {
  std::vector<std::vector<NodeId>> adjacency;
  friend bool operator==(const ExplicitDescription&, const ExplicitDescription&) = default;
};

using TopologyDescription = std::variant<CircleDescription, ExplicitDescription>;

inline Topology load_topology(const TopologyDescription& description) {
  if (const auto* circle = std::get_if<CircleDescription>(&description)) {
    return build_circle_deployment(circle->n, circle->diameter, circle->range);
  }
  return Topology(std::get<ExplicitDescription>(description).adjacency);
}

/// Degree and attacker-count conditions of the two resilience guarantees.
struct ConditionReport {
  MechanismKind mechanism = MechanismKind::Mechanism1;
  std::int64_t n = 0;
  std::int64_t d = 0;
  std::int64_t m = 0;
  /// floor(2N/3) for Mechanism 1, floor(3N/4) for Mechanism 2.
  std::int64_t degree_bound = 0;
  bool degree_ok = false;
  bool attacker_bound_ok = false;
  std::int64_t max_allowed_attackers = 0;

  bool ok() const { return degree_ok && attacker_bound_ok; }
};

inline ConditionReport validate_conditions(const Topology& topology, MechanismKind mechanism,
                                           std::size_t m) {
  if (mechanism == MechanismKind::Conventional) {
    throw std::invalid_argument("the conventional mechanism has no synchronization conditions");
  }
  if (m >= topology.size()) {
    throw std::invalid_argument("attacker count must be below the node count");
  }
  ConditionReport r;
  r.mechanism = mechanism;
  r.n = static_cast<std::int64_t>(topology.size());
  r.d = static_cast<std::int64_t>(topology.network_degree());
  r.m = static_cast<std::int64_t>(m);
  if (mechanism == MechanismKind::Mechanism1) {
    r.degree_bound = 2 * r.n / 3;
    r.max_allowed_attackers = r.d - r.degree_bound - 1;
  } else {
    r.degree_bound = 3 * r.n / 4;
    r.max_allowed_attackers = r.d / 6 - 1;
  }
  r.degree_ok = r.d > r.degree_bound;
  r.attacker_bound_ok = r.m <= r.max_allowed_attackers;
  return r;
}

}  // namespace pcosync

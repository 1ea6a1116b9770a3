#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reid/events.hpp"

namespace reid {

struct GraphEdge {
  int src = 0;
  int dst = 0;
  Rel rel = Rel::PP;
  std::int64_t count = 1;  // raw events collapsed into this edge

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Per-(program, window) heterogeneous behavior graph. Nodes are entities
// merged across hosts by canonical id; repeated (src, dst, rel) events
// collapse into one counted edge. Node ids are canonical: target first,
// then ascending (BFS round, canonical id), so serialization is
// byte-stable under any permutation of the input events.
class BehaviorGraph {
 public:
  BehaviorGraph(std::vector<Entity> nodes, int target, std::vector<GraphEdge> edges,
                std::pair<std::int64_t, std::int64_t> window, std::string claimed_id);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Entity>& nodes() const { return nodes_; }
  const Entity& node(int id) const;
  int target() const { return target_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  std::pair<std::int64_t, std::int64_t> window() const { return window_; }
  const std::string& claimed_id() const { return claimed_id_; }

  // Undirected neighbor ids, optionally restricted to one relation.
  // Sorted ascending; contains the node itself only on a self-edge.
  std::vector<int> neighbors(int node, std::optional<Rel> rel_filter = std::nullopt) const;

  // Undirected neighbor multiplicities: total collapsed event count per
  // adjacent node, summed over both directions and all relations.
  std::vector<std::pair<int, std::int64_t>> neighbor_counts(int node) const;

  std::string to_json() const;
  static BehaviorGraph from_json(const std::string& text);

  // Same graph claiming a different program id: the target node is renamed,
  // which is how training negatives ("window of B presented as A") are made.
  BehaviorGraph with_claim(const std::string& new_claim) const;

 private:
  void check_node(int id) const;

  std::vector<Entity> nodes_;
  int target_;
  std::vector<GraphEdge> edges_;
  std::pair<std::int64_t, std::int64_t> window_;
  std::string claimed_id_;
  // adjacency_[v] = sorted (neighbor, rel, count) triples, both directions.
  struct Adj {
    int peer;
    Rel rel;
    std::int64_t count;
  };
  std::vector<std::vector<Adj>> adjacency_;
};

// Builds the hops-bounded behavior graph around the claimed program.
//
// Events are first filtered to ts in [window.start, window.end) and merged
// across hosts. Starting from the claimed Process node, the subgraph grows
// one frontier expansion per round for `hops` rounds; every event incident
// to a reached node is kept, so terminal endpoints discovered by the last
// round's events are part of the graph.
//
// Errors: empty_window (no in-window events), target_absent (claimed id
// never appears as a Process in-window).
BehaviorGraph build_behavior_graph(const std::vector<SystemEvent>& events,
                                   const std::string& claimed_id,
                                   std::pair<std::int64_t, std::int64_t> window, int hops = 3);

}  // namespace reid

#include "reid/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"

namespace reid {

using nlohmann::json;

BehaviorGraph::BehaviorGraph(std::vector<Entity> nodes, int target, std::vector<GraphEdge> edges,
                             std::pair<std::int64_t, std::int64_t> window, std::string claimed_id)
    : nodes_(std::move(nodes)),
      target_(target),
      edges_(std::move(edges)),
      window_(window),
      claimed_id_(std::move(claimed_id)) {
  if (target_ < 0 || target_ >= node_count())
    throw Error(Errc::bad_node_id, "target id out of range");
  if (nodes_[target_].kind != EntityType::Process || nodes_[target_].key != claimed_id_)
    throw Error(Errc::type_mismatch, "target node must be the claimed Process");
  adjacency_.resize(nodes_.size());
  for (const auto& e : edges_) {
    check_node(e.src);
    check_node(e.dst);
    if (e.count < 1) throw Error(Errc::shape_mismatch, "edge count must be >= 1");
    if (nodes_[e.src].kind != EntityType::Process || nodes_[e.dst].kind != dst_kind_for(e.rel))
      throw Error(Errc::type_mismatch, "edge relation inconsistent with endpoint kinds");
    adjacency_[e.src].push_back({e.dst, e.rel, e.count});
    if (e.dst != e.src) adjacency_[e.dst].push_back({e.src, e.rel, e.count});
  }
  for (auto& adj : adjacency_)
    std::sort(adj.begin(), adj.end(), [](const Adj& a, const Adj& b) {
      return std::tie(a.peer, a.rel, a.count) < std::tie(b.peer, b.rel, b.count);
    });
}

const Entity& BehaviorGraph::node(int id) const {
  check_node(id);
  return nodes_[id];
}

void BehaviorGraph::check_node(int id) const {
  if (id < 0 || id >= node_count())
    throw Error(Errc::bad_node_id, "node id " + std::to_string(id) + " out of range");
}

std::vector<int> BehaviorGraph::neighbors(int node, std::optional<Rel> rel_filter) const {
  check_node(node);
  std::vector<int> out;
  for (const Adj& a : adjacency_[node]) {
    if (rel_filter && a.rel != *rel_filter) continue;
    if (out.empty() || out.back() != a.peer) out.push_back(a.peer);
  }
  return out;
}

std::vector<std::pair<int, std::int64_t>> BehaviorGraph::neighbor_counts(int node) const {
  check_node(node);
  std::vector<std::pair<int, std::int64_t>> out;
  for (const Adj& a : adjacency_[node]) {
    if (!out.empty() && out.back().first == a.peer)
      out.back().second += a.count;
    else
      out.emplace_back(a.peer, a.count);
  }
  return out;
}

BehaviorGraph build_behavior_graph(const std::vector<SystemEvent>& events,
                                   const std::string& claimed_id,
                                   std::pair<std::int64_t, std::int64_t> window, int hops) {
  if (hops < 1) throw Error(Errc::shape_mismatch, "hops must be >= 1");
  if (window.first >= window.second) throw Error(Errc::shape_mismatch, "window start >= end");

  // In-window events, entities merged across hosts by canonical id.
  std::vector<const SystemEvent*> scoped;
  for (const auto& e : events)
    if (e.ts >= window.first && e.ts < window.second) scoped.push_back(&e);
  if (scoped.empty()) throw Error(Errc::empty_window, "no events in window");

  std::map<std::string, int> id_of;
  std::vector<Entity> entities;
  auto intern = [&](const Entity& e) {
    auto [it, fresh] = id_of.try_emplace(canonical_entity_id(e), entities.size());
    if (fresh) entities.push_back(e);
    return it->second;
  };
  struct RawEdge {
    int src, dst;
    Rel rel;
  };
  std::vector<RawEdge> raw;
  raw.reserve(scoped.size());
  for (const auto* e : scoped) raw.push_back({intern(e->src), intern(e->dst), e->rel});

  const auto target_it = id_of.find("P:" + claimed_id);
  if (target_it == id_of.end())
    throw Error(Errc::target_absent,
                "'" + claimed_id + "' never appears as a Process in the window");
  const int target = target_it->second;

  // BFS rounds from the target over the undirected event relation.
  constexpr int kUnreached = std::numeric_limits<int>::max();
  std::vector<int> dist(entities.size(), kUnreached);
  std::vector<std::vector<int>> adj(entities.size());
  for (const auto& e : raw) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::deque<int> queue{target};
  dist[target] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : adj[v])
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }

  // An event is in scope once either endpoint has been reached, so the
  // last round's events carry their terminal endpoints into the graph.
  std::vector<bool> keep(raw.size(), false);
  std::set<int> kept_nodes{target};
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const int d = std::min(dist[raw[i].src], dist[raw[i].dst]);
    if (d <= hops && d != kUnreached) {
      keep[i] = true;
      kept_nodes.insert(raw[i].src);
      kept_nodes.insert(raw[i].dst);
    }
  }

  // Canonical node order: target first, then (BFS round, canonical id).
  std::vector<int> order(kept_nodes.begin(), kept_nodes.end());
  std::erase(order, target);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const int da = dist[a] == kUnreached ? hops + 1 : dist[a];
    const int db = dist[b] == kUnreached ? hops + 1 : dist[b];
    if (da != db) return da < db;
    return canonical_entity_id(entities[a]) < canonical_entity_id(entities[b]);
  });
  order.insert(order.begin(), target);

  std::vector<int> new_id(entities.size(), -1);
  std::vector<Entity> nodes;
  nodes.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_id[order[i]] = static_cast<int>(i);
    nodes.push_back(entities[order[i]]);
  }

  // Collapse duplicate (src, dst, rel) triples into counted edges.
  std::map<std::tuple<int, int, Rel>, std::int64_t> counted;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (keep[i]) ++counted[{new_id[raw[i].src], new_id[raw[i].dst], raw[i].rel}];
  std::vector<GraphEdge> edges;
  edges.reserve(counted.size());
  for (const auto& [key, count] : counted)
    edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), count});

  return BehaviorGraph(std::move(nodes), 0, std::move(edges), window, claimed_id);
}

std::string BehaviorGraph::to_json() const {
  json j;
  j["claimed_id"] = claimed_id_;
  j["window"] = {window_.first, window_.second};
  json nodes = json::array();
  for (const auto& n : nodes_)
    nodes.push_back({{"kind", entity_type_name(n.kind)}, {"key", n.key}});
  j["nodes"] = std::move(nodes);
  j["target"] = target_;
  json edges = json::array();
  for (const auto& e : edges_) edges.push_back({e.src, e.dst, rel_name(e.rel), e.count});
  j["edges"] = std::move(edges);
  return j.dump();
}

BehaviorGraph BehaviorGraph::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw Error(Errc::malformed_line, "behavior graph is not valid JSON");
  }
  try {
    std::vector<Entity> nodes;
    for (const auto& n : j.at("nodes"))
      nodes.push_back({entity_type_from(n.at("kind").get<std::string>()),
                       n.at("key").get<std::string>()});
    std::vector<GraphEdge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(),
                       rel_from(e.at(2).get<std::string>()), e.at(3).get<std::int64_t>()});
    return BehaviorGraph(std::move(nodes), j.at("target").get<int>(), std::move(edges),
                         {j.at("window").at(0).get<std::int64_t>(),
                          j.at("window").at(1).get<std::int64_t>()},
                         j.at("claimed_id").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line, std::string("behavior graph schema: ") + e.what());
  }
}

BehaviorGraph BehaviorGraph::with_claim(const std::string& new_claim) const {
  std::vector<Entity> nodes = nodes_;
  nodes[target_].key = new_claim;
  return BehaviorGraph(std::move(nodes), target_, edges_, window_, new_claim);
}

}  // namespace reid

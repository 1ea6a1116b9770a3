#include "reid/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace reid {

const char* feature_set_name(FeatureSet f) {
  switch (f) {
    case FeatureSet::Con: return "con";
    case FeatureSet::Stat: return "stat";
    case FeatureSet::Both: return "both";
  }
  return "?";
}

FeatureSet feature_set_from(const std::string& s) {
  if (s == "con") return FeatureSet::Con;
  if (s == "stat") return FeatureSet::Stat;
  if (s == "both") return FeatureSet::Both;
  throw Error(Errc::bad_config, "unknown feature set '" + s + "'");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> connectivity_features(const BehaviorGraph& g, int node, int d_con) {
  if (d_con < 1) throw Error(Errc::bad_config, "d_con must be >= 1");
  std::vector<double> vec(static_cast<std::size_t>(d_con), 0.0);
  for (const auto& [peer, count] : g.neighbor_counts(node)) {
    const std::uint64_t h = fnv1a64(canonical_entity_id(g.node(peer)));
    vec[h % static_cast<std::uint64_t>(d_con)] += std::log1p(static_cast<double>(count));
  }
  return vec;
}

namespace {

// Simple undirected adjacency (self-loops dropped) used by the shortest-
// path statistics.
std::vector<std::vector<int>> simple_adjacency(const BehaviorGraph& g) {
  std::vector<std::vector<int>> adj(g.node_count());
  for (int v = 0; v < g.node_count(); ++v)
    for (int u : g.neighbors(v))
      if (u != v) adj[v].push_back(u);
  return adj;
}

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int start) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{start};
  dist[start] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  return dist;
}

}  // namespace

double degree_centrality(const BehaviorGraph& g, int node) {
  const int n = g.node_count();
  if (n <= 1) return 0.0;
  return static_cast<double>(g.neighbors(node).size()) / (n - 1);
}

double closeness_centrality(const BehaviorGraph& g, int node) {
  const int n = g.node_count();
  if (n <= 1) return 0.0;
  const std::vector<int> dist = bfs_distances(simple_adjacency(g), node);
  std::int64_t reached = 0;
  std::int64_t total = 0;
  for (int v = 0; v < n; ++v) {
    if (v == node || dist[v] < 0) continue;
    ++reached;
    total += dist[v];
  }
  if (reached == 0) return 0.0;
  const double r = static_cast<double>(reached);
  return (r / (n - 1)) * (r / static_cast<double>(total));
}

std::vector<double> betweenness_centrality(const BehaviorGraph& g) {
  const int n = g.node_count();
  std::vector<double> cb(n, 0.0);
  if (n < 3) return cb;
  const auto adj = simple_adjacency(g);

  // Brandes' accumulation; endpoints excluded by construction.
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<int>> pred(n);
    std::vector<double> sigma(n, 0.0);
    std::vector<int> dist(n, -1);
    std::vector<int> stack;
    std::deque<int> queue{s};
    sigma[s] = 1.0;
    dist[s] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      stack.push_back(v);
      for (int w : adj[v]) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    std::vector<double> delta(n, 0.0);
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
      const int w = *it;
      for (int v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  // Each unordered pair is seen from both ends; the pair count is
  // (n-1)(n-2)/2, so the combined normalizer is (n-1)(n-2).
  const double norm = static_cast<double>(n - 1) * (n - 2);
  for (double& v : cb) v /= norm;
  return cb;
}

double clustering_coefficient(const BehaviorGraph& g, int node) {
  std::vector<int> nbrs = g.neighbors(node);
  std::erase(nbrs, node);
  const int k = static_cast<int>(nbrs.size());
  if (k < 2) return 0.0;
  int links = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    const std::vector<int> ni = g.neighbors(nbrs[i]);
    for (std::size_t j = i + 1; j < nbrs.size(); ++j)
      if (std::binary_search(ni.begin(), ni.end(), nbrs[j])) ++links;
  }
  return 2.0 * links / (static_cast<double>(k) * (k - 1));
}

void assemble_features(const BehaviorGraph& g, MultiChannelGraph& mcg, const FeatureConfig& cfg) {
  if (cfg.width() == 0) throw Error(Errc::bad_config, "feature config selects no features");

  const int n = g.node_count();
  std::vector<std::vector<double>> rows(n);
  std::vector<double> btw;
  if (cfg.include_stat()) btw = betweenness_centrality(g);
  for (int v = 0; v < n; ++v) {
    auto& row = rows[v];
    row.reserve(cfg.width());
    if (cfg.include_con()) {
      const auto con = connectivity_features(g, v, cfg.d_con);
      row.insert(row.end(), con.begin(), con.end());
    }
    if (cfg.include_stat()) {
      row.push_back(degree_centrality(g, v));
      row.push_back(closeness_centrality(g, v));
      row.push_back(btw[v]);
      row.push_back(clustering_coefficient(g, v));
    }
  }

  mcg.features.clear();
  mcg.features.reserve(mcg.channels.size());
  for (const auto& ch : mcg.channels) {
    Tensor x(static_cast<int>(ch.node_ids.size()), cfg.width());
    for (std::size_t i = 0; i < ch.node_ids.size(); ++i)
      for (int c = 0; c < cfg.width(); ++c) x.at(static_cast<int>(i), c) = rows[ch.node_ids[i]][c];
    mcg.features.push_back(std::move(x));
  }
}

}  // namespace reid

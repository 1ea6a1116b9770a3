#include "reid/channels.hpp"

#include <algorithm>
#include <set>

namespace reid {

const char* meta_path_name(MetaPath m) {
  switch (m) {
    case MetaPath::PP: return "PP";
    case MetaPath::PF: return "PF";
    case MetaPath::PI: return "PI";
    case MetaPath::PFP: return "PFP";
    case MetaPath::PIP: return "PIP";
  }
  return "?";
}

MetaPath meta_path_from(const std::string& s) {
  if (s == "PP") return MetaPath::PP;
  if (s == "PF") return MetaPath::PF;
  if (s == "PI") return MetaPath::PI;
  if (s == "PFP") return MetaPath::PFP;
  if (s == "PIP") return MetaPath::PIP;
  throw Error(Errc::bad_config, "unknown meta-path '" + s + "'");
}

Tensor propagation_matrix(const Tensor& adjacency) {
  const int n = adjacency.rows();
  if (n != adjacency.cols()) throw Error(Errc::not_symmetric, "adjacency must be square");
  for (int i = 0; i < n; ++i) {
    if (adjacency.at(i, i) != 1.0) throw Error(Errc::zero_diagonal, "diagonal must be all ones");
    for (int j = i + 1; j < n; ++j)
      if (adjacency.at(i, j) != adjacency.at(j, i))
        throw Error(Errc::not_symmetric, "adjacency must be symmetric");
  }
  Tensor prop(n, n);
  for (int i = 0; i < n; ++i) {
    double degree = 0.0;
    for (int j = 0; j < n; ++j) degree += adjacency.at(i, j);
    for (int j = 0; j < n; ++j) prop.at(i, j) = adjacency.at(i, j) / degree;
  }
  return prop;
}

namespace {

Rel base_rel(MetaPath m) {
  switch (m) {
    case MetaPath::PP: return Rel::PP;
    case MetaPath::PF:
    case MetaPath::PFP: return Rel::PF;
    case MetaPath::PI:
    case MetaPath::PIP: return Rel::PI;
  }
  return Rel::PP;
}

ChannelGraph build_channel(const BehaviorGraph& g, MetaPath path) {
  const Rel rel = base_rel(path);
  const bool two_step = path == MetaPath::PFP || path == MetaPath::PIP;

  std::set<int> members{g.target()};
  std::vector<std::pair<int, int>> links;  // undirected, behavior-graph ids
  if (!two_step) {
    for (const auto& e : g.edges())
      if (e.rel == rel) {
        members.insert(e.src);
        members.insert(e.dst);
        links.emplace_back(e.src, e.dst);
      }
  } else {
    // Processes sharing a mediator: compose the incidence with its
    // transpose, dropping the diagonal before self-loops go back in.
    for (const auto& e : g.edges())
      if (e.rel == rel) members.insert(e.src);
    for (int v = 0; v < g.node_count(); ++v) {
      if (g.node(v).kind != (rel == Rel::PF ? EntityType::File : EntityType::Socket)) continue;
      const std::vector<int> procs = g.neighbors(v, rel);
      for (std::size_t a = 0; a < procs.size(); ++a)
        for (std::size_t b = a + 1; b < procs.size(); ++b)
          links.emplace_back(procs[a], procs[b]);
    }
  }

  ChannelGraph ch;
  ch.node_ids.assign(members.begin(), members.end());  // ascending = graph order
  const int n = static_cast<int>(ch.node_ids.size());
  std::vector<int> local(g.node_count(), -1);
  for (int i = 0; i < n; ++i) local[ch.node_ids[i]] = i;
  ch.target_index = local[g.target()];

  Tensor adj(n, n);
  for (int i = 0; i < n; ++i) adj.at(i, i) = 1.0;  // self-loops keep prop total
  for (const auto& [a, b] : links) {
    adj.at(local[a], local[b]) = 1.0;
    adj.at(local[b], local[a]) = 1.0;
  }
  ch.adjacency = adj;
  ch.prop = propagation_matrix(adj);
  return ch;
}

}  // namespace

MultiChannelGraph transform_multichannel(const BehaviorGraph& g,
                                         const std::vector<MetaPath>& paths) {
  if (paths.empty()) throw Error(Errc::no_channels, "channel list is empty");
  std::set<MetaPath> seen;
  for (MetaPath p : paths)
    if (!seen.insert(p).second)
      throw Error(Errc::bad_config, std::string("duplicate channel ") + meta_path_name(p));

  MultiChannelGraph mcg;
  mcg.paths = paths;
  mcg.claimed_id = g.claimed_id();
  mcg.channels.reserve(paths.size());
  for (MetaPath p : paths) mcg.channels.push_back(build_channel(g, p));
  return mcg;
}

}  // namespace reid

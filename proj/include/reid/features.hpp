#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reid/channels.hpp"
#include "reid/graph.hpp"
#include "reid/tensor.hpp"

namespace reid {

enum class FeatureSet { Con, Stat, Both };

const char* feature_set_name(FeatureSet f);
FeatureSet feature_set_from(const std::string& s);

struct FeatureConfig {
  int d_con = 256;
  FeatureSet set = FeatureSet::Both;

  bool include_con() const { return set != FeatureSet::Stat; }
  bool include_stat() const { return set != FeatureSet::Con; }
  int width() const { return (include_con() ? d_con : 0) + (include_stat() ? 4 : 0); }
};

std::uint64_t fnv1a64(const std::string& s);

// Hashed first-order neighbor multiset: each behavior-graph neighbor u with
// total multiplicity c adds log1p(c) into bucket fnv1a64(id(u)) % d_con.
// The fixed width stands in for the variable |V|-length proximity vector.
std::vector<double> connectivity_features(const BehaviorGraph& g, int node, int d_con);

// All four on the undirected behavior graph, each in [0, 1].
double degree_centrality(const BehaviorGraph& g, int node);
double closeness_centrality(const BehaviorGraph& g, int node);  // Wasserman-Faust
std::vector<double> betweenness_centrality(const BehaviorGraph& g);  // Brandes
double clustering_coefficient(const BehaviorGraph& g, int node);

// Fills mcg.features: one row per channel node, columns =
// [connectivity | degree, closeness, betweenness, clustering] per config.
// Statistics are computed once on the whole behavior graph and shared
// across channels.
void assemble_features(const BehaviorGraph& g, MultiChannelGraph& mcg, const FeatureConfig& cfg);

}  // namespace reid

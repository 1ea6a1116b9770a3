#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reid/graph.hpp"
#include "reid/tensor.hpp"

namespace reid {

// One-step meta-paths match the three event relations; the two-step forms
// connect processes through a shared file (PFP) or socket (PIP).
enum class MetaPath { PP, PF, PI, PFP, PIP };

const char* meta_path_name(MetaPath m);
MetaPath meta_path_from(const std::string& s);

// One homogeneous-relation channel: the nodes touched by the meta-path
// (target always present, behavior-graph order preserved), a symmetric 0/1
// adjacency with unit diagonal, and the row-stochastic propagation matrix
// D^-1 A over it.
struct ChannelGraph {
  std::vector<int> node_ids;  // behavior-graph node ids, ascending
  Tensor adjacency;
  Tensor prop;
  int target_index = 0;
};

// The meta-path decomposition of one behavior graph, plus (once assembled)
// the per-channel node feature matrices. Channel order follows the
// configured path list.
struct MultiChannelGraph {
  std::vector<MetaPath> paths;
  std::vector<ChannelGraph> channels;   // aligned with paths
  std::vector<Tensor> features;         // aligned with paths; filled later
  std::string claimed_id;
  std::optional<int> label;             // +1 / -1 when known
};

// Row-normalizes a symmetric 0/1 adjacency with unit diagonal.
// Errors: not_symmetric, zero_diagonal.
Tensor propagation_matrix(const Tensor& adjacency);

// Errors: no_channels (empty path list).
MultiChannelGraph transform_multichannel(const BehaviorGraph& g,
                                         const std::vector<MetaPath>& paths);

}  // namespace reid

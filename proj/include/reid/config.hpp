#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reid/channels.hpp"
#include "reid/encoder.hpp"
#include "reid/features.hpp"

namespace reid {

enum class Fusion { Attention, Concat };

const char* fusion_name(Fusion f);
Fusion fusion_from(const std::string& s);

// One config shared by every command. File format is `key = value` lines
// ('#' comments); unknown keys are rejected. Precedence: CLI flags over
// file over these defaults.
struct RunConfig {
  std::vector<MetaPath> channels{MetaPath::PP, MetaPath::PF, MetaPath::PI};
  FeatureSet feature_set = FeatureSet::Both;
  int d_con = 256;
  int n_layers = 3;
  int hidden_dim = 32;
  Propagation propagation = Propagation::Diffusion;
  Fusion fusion = Fusion::Attention;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int epochs = 200;
  int patience = 20;
  std::uint64_t seed = 7;
  int hops = 3;
  std::int64_t window_len = 86400;

  EncoderConfig encoder() const { return {n_layers, hidden_dim, propagation}; }
  FeatureConfig feature_config() const { return {d_con, feature_set}; }
  int input_dim() const { return feature_config().width(); }
  int joint_dim() const {
    return fusion == Fusion::Concat ? hidden_dim * static_cast<int>(channels.size())
                                    : hidden_dim;
  }

  void validate() const;  // throws bad_config
};

// Applies one `key = value` pair; shared by the file parser and CLI
// overrides so precedence rules stay trivial. Throws bad_config on unknown
// keys or unparsable values.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);

}  // namespace reid

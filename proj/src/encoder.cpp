#include "reid/encoder.hpp"

#include <cmath>

namespace reid {

const char* propagation_name(Propagation p) {
  return p == Propagation::Diffusion ? "diffusion" : "identity";
}

Propagation propagation_from(const std::string& s) {
  if (s == "diffusion") return Propagation::Diffusion;
  if (s == "identity") return Propagation::Identity;
  throw Error(Errc::bad_config, "unknown propagation mode '" + s + "'");
}

Tensor glorot_uniform(int rows, int cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / (rows + cols));
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
  return t;
}

ChannelEncoderParams init_channel_encoder(int input_dim, const EncoderConfig& cfg, Rng& rng) {
  if (cfg.hidden_dim < 1) throw Error(Errc::bad_config, "hidden_dim must be >= 1");
  if (cfg.n_layers < 1 || cfg.n_layers > 3)
    throw Error(Errc::bad_config, "n_layers must be 1, 2 or 3");
  ChannelEncoderParams p;
  p.weights.push_back(glorot_uniform(input_dim, cfg.hidden_dim, rng));
  for (int l = 1; l < cfg.n_layers; ++l)
    p.weights.push_back(glorot_uniform(cfg.hidden_dim, cfg.hidden_dim, rng));
  return p;
}

Tensor prop_layer(const Tensor& prop, const Tensor& h, Propagation mode) {
  if (mode == Propagation::Identity) return h;
  return matmul(prop, h);
}

Tensor perce_layer(const Tensor& h_hat, const Tensor& weight) {
  return relu(matmul(h_hat, weight));
}

Tensor cge_forward(const ChannelGraph& ch, const Tensor& features,
                   const ChannelEncoderParams& params, const EncoderConfig& cfg) {
  if (features.rows() != static_cast<int>(ch.node_ids.size()))
    throw Error(Errc::shape_mismatch, "feature rows do not match channel nodes");
  Tensor h = features;
  for (const Tensor& w : params.weights) h = perce_layer(prop_layer(ch.prop, h, cfg.propagation), w);
  return row_of(h, ch.target_index);
}

Var cge_forward(Tape& tape, const ChannelGraph& ch, const Tensor& features,
                std::span<const Var> weights, const EncoderConfig& cfg) {
  if (features.rows() != static_cast<int>(ch.node_ids.size()))
    throw Error(Errc::shape_mismatch, "feature rows do not match channel nodes");
  const bool diffuse = cfg.propagation == Propagation::Diffusion;
  Var prop;
  if (diffuse) prop = tape.constant(ch.prop);
  Var h = tape.constant(features);
  for (const Var& w : weights) {
    if (diffuse) h = tape.matmul(prop, h);
    h = tape.relu(tape.matmul(h, w));
  }
  return tape.row_of(h, ch.target_index);
}

}  // namespace reid

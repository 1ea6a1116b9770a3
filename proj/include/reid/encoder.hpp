#pragma once

#include <span>
#include <string>
#include <vector>

#include "reid/autodiff.hpp"
#include "reid/channels.hpp"
#include "reid/rng.hpp"
#include "reid/tensor.hpp"

namespace reid {

// Identity propagation turns the encoder into a plain MLP on the target's
// own features (the degenerate baseline configuration).
enum class Propagation { Diffusion, Identity };

const char* propagation_name(Propagation p);
Propagation propagation_from(const std::string& s);

struct EncoderConfig {
  int n_layers = 3;  // 3 = deep, 1 = shallow
  int hidden_dim = 32;
  Propagation propagation = Propagation::Diffusion;
};

// Per-channel stack: weights[0] is input_dim x hidden, the rest are
// hidden x hidden. Channels do not share weights.
struct ChannelEncoderParams {
  std::vector<Tensor> weights;
};

// Scaled-uniform init: +-sqrt(6 / (fan_in + fan_out)) per matrix.
Tensor glorot_uniform(int rows, int cols, Rng& rng);
ChannelEncoderParams init_channel_encoder(int input_dim, const EncoderConfig& cfg, Rng& rng);

// One diffusion step P*h (or h unchanged in identity mode).
Tensor prop_layer(const Tensor& prop, const Tensor& h, Propagation mode);
// ReLU(h_hat * W); the stack has no bias terms.
Tensor perce_layer(const Tensor& h_hat, const Tensor& weight);

// n_layers of prop+perce over the channel, reusing the channel's single
// propagation matrix at every layer; returns the target node's final row.
Tensor cge_forward(const ChannelGraph& ch, const Tensor& features,
                   const ChannelEncoderParams& params, const EncoderConfig& cfg);

// Tape variant used by training; forward values match the plain variant
// bitwise. `weights` are the lifted per-layer weight vars for this channel.
Var cge_forward(Tape& tape, const ChannelGraph& ch, const Tensor& features,
                std::span<const Var> weights, const EncoderConfig& cfg);

}  // namespace reid

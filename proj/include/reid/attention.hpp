#pragma once

#include <span>
#include <vector>

#include "reid/autodiff.hpp"
#include "reid/rng.hpp"
#include "reid/tensor.hpp"

namespace reid {

// Channel-aware attention: every channel embedding is projected through a
// shared map W_a, scored against each channel (including itself) by the
// attention vector `a` through a LeakyReLU(0.2) gate, and the per-channel
// mean scores are softmax-normalized into the fusion weights.
struct AttentionParams {
  Tensor wa;  // hidden_dim x att_dim
  Tensor a;   // 1 x (2 * att_dim)
};

AttentionParams init_attention(int hidden_dim, int att_dim, Rng& rng);

constexpr double kAttentionSlope = 0.2;

// e_ik = LeakyReLU(a . [W_a^T h_i || W_a^T h_k], 0.2)
double pair_score(const Tensor& h_i, const Tensor& h_k, const AttentionParams& params);

// alpha = softmax over channels of mean_k e_ik. Strictly positive, sums
// to 1; exactly equivariant under permutation of the channel list.
Tensor attention_weights(const std::vector<Tensor>& channel_embeddings,
                         const AttentionParams& params);

// sum_i alpha_i * h_i
Tensor joint_embedding(const std::vector<Tensor>& channel_embeddings, const Tensor& alpha);

// Concatenation fusion (the attention-free ablation).
Tensor concat_embedding(const std::vector<Tensor>& channel_embeddings);

struct AttentionOut {
  Var alpha;  // 1 x |C|
  Var joint;  // 1 x hidden_dim
};

// Tape variant; forward values match the plain functions bitwise.
AttentionOut attention_fuse(Tape& tape, std::span<const Var> channel_embeddings, Var wa, Var a);

Var concat_fuse(Tape& tape, std::span<const Var> channel_embeddings);

}  // namespace reid

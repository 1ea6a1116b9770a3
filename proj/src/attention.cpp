#include "reid/attention.hpp"

#include "reid/encoder.hpp"

namespace reid {

AttentionParams init_attention(int hidden_dim, int att_dim, Rng& rng) {
  AttentionParams p;
  p.wa = glorot_uniform(hidden_dim, att_dim, rng);
  // Zero attention vector: every pair score starts at 0, so the weights
  // start exactly uniform and no channel is starved before training has
  // seen any signal. Gradients reach `a` through the concat projections.
  p.a = Tensor(1, 2 * att_dim);
  return p;
}

double pair_score(const Tensor& h_i, const Tensor& h_k, const AttentionParams& params) {
  const Tensor u_i = matmul(h_i, params.wa);
  const Tensor u_k = matmul(h_k, params.wa);
  const double z = dot(params.a, concat_cols(u_i, u_k));
  return z > 0.0 ? z : kAttentionSlope * z;
}

Tensor attention_weights(const std::vector<Tensor>& channel_embeddings,
                         const AttentionParams& params) {
  if (channel_embeddings.empty()) throw Error(Errc::no_channels, "no channel embeddings");
  const std::size_t c = channel_embeddings.size();
  Tensor scores(1, static_cast<int>(c));
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<double> row(c);
    for (std::size_t k = 0; k < c; ++k)
      row[k] = pair_score(channel_embeddings[i], channel_embeddings[k], params);
    scores[i] = stable_sum(std::move(row)) / static_cast<double>(c);
  }
  return softmax_vec(scores);
}

Tensor joint_embedding(const std::vector<Tensor>& channel_embeddings, const Tensor& alpha) {
  if (alpha.rows() != 1 || alpha.cols() != static_cast<int>(channel_embeddings.size()))
    throw Error(Errc::shape_mismatch, "one weight per channel embedding expected");
  Tensor out(channel_embeddings[0].rows(), channel_embeddings[0].cols());
  for (std::size_t i = 0; i < channel_embeddings.size(); ++i) {
    const Tensor& h = channel_embeddings[i];
    if (!h.same_shape(out)) throw Error(Errc::shape_mismatch, "embedding shapes differ");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += alpha[i] * h[k];
  }
  return out;
}

Tensor concat_embedding(const std::vector<Tensor>& channel_embeddings) {
  if (channel_embeddings.empty()) throw Error(Errc::no_channels, "no channel embeddings");
  Tensor out = channel_embeddings[0];
  for (std::size_t i = 1; i < channel_embeddings.size(); ++i)
    out = concat_cols(out, channel_embeddings[i]);
  return out;
}

AttentionOut attention_fuse(Tape& tape, std::span<const Var> channel_embeddings, Var wa, Var a) {
  if (channel_embeddings.empty()) throw Error(Errc::no_channels, "no channel embeddings");
  const std::size_t c = channel_embeddings.size();
  std::vector<Var> projected(c);
  for (std::size_t i = 0; i < c; ++i) projected[i] = tape.matmul(channel_embeddings[i], wa);

  Var scores;
  for (std::size_t i = 0; i < c; ++i) {
    Var row;
    for (std::size_t k = 0; k < c; ++k) {
      const Var e = tape.leaky_relu(
          tape.dot(a, tape.concat_cols(projected[i], projected[k])), kAttentionSlope);
      row = k == 0 ? e : tape.concat_cols(row, e);
    }
    const Var s = tape.mean_vec(row);
    scores = i == 0 ? s : tape.concat_cols(scores, s);
  }

  AttentionOut out;
  out.alpha = tape.softmax_vec(scores);
  out.joint = tape.scale_add(out.alpha, channel_embeddings);
  return out;
}

Var concat_fuse(Tape& tape, std::span<const Var> channel_embeddings) {
  if (channel_embeddings.empty()) throw Error(Errc::no_channels, "no channel embeddings");
  Var out = channel_embeddings[0];
  for (std::size_t i = 1; i < channel_embeddings.size(); ++i)
    out = tape.concat_cols(out, channel_embeddings[i]);
  return out;
}

}  // namespace reid

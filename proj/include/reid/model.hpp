#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reid/attention.hpp"
#include "reid/autodiff.hpp"
#include "reid/channels.hpp"
#include "reid/config.hpp"
#include "reid/encoder.hpp"

namespace reid {

// Every trainable tensor of one per-program verifier. The flat tensors()
// order (channel weights, then attention, then classifier) is the order
// gradients and Adam state follow.
struct ModelParams {
  std::vector<ChannelEncoderParams> enc;  // aligned with config channels
  AttentionParams att;
  Tensor clf_w;  // 1 x joint_dim
  Tensor clf_b;  // 1 x 1

  std::vector<Tensor*> tensors();
  std::vector<const Tensor*> tensors() const;
};

ModelParams init_model_params(const RunConfig& cfg);

// Per-example forward pass output.
struct Prediction {
  double yhat = 0.0;                // sigmoid(w . h_join + b), in (0, 1)
  std::vector<double> alpha;        // per-channel attention (empty in concat mode)
  std::vector<double> joint;        // fused embedding, for export
};

Prediction predict(const MultiChannelGraph& example, const ModelParams& params,
                   const RunConfig& cfg);

// Decision rule: +1 iff yhat >= 0.5 (ties go to +1).
int decide(double yhat);

// Mean binary cross-entropy with labels in {+1,-1} mapped to {1,0};
// predictions clamped to [1e-12, 1-1e-12].
double bce_loss(const std::vector<double>& yhat, const std::vector<int>& labels);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
};

AdamState init_adam_state(const ModelParams& params);

// One Adam update with bias correction, t counted from 1.
// Throws non_finite (with step context) if any parameter leaves R.
void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state, int t,
               const RunConfig& cfg);

struct EpochStats {
  double loss = 0.0;
  double acc = 0.0;
};

struct TrainedModel {
  ModelParams params;
  RunConfig config;
  std::string claimed_id;
  std::vector<EpochStats> history;
  bool single_class_warning = false;
};

// Full-batch Adam training. Stops early once training accuracy has been
// 1.0 for `patience` consecutive epochs. Deterministic per config seed.
TrainedModel train(const std::vector<MultiChannelGraph>& dataset, const RunConfig& cfg,
                   const std::string& claimed_id);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// Tape plumbing shared by train() and predict(). Exposed for gradient
// checks that need the loss as a function of raw parameter tensors.
struct ParamVars {
  std::vector<std::vector<Var>> enc;
  Var wa, a, w, b;
  std::vector<Var> flat;  // same order as ModelParams::tensors()
};

ParamVars lift_params(Tape& tape, const ModelParams& params, bool requires_grad);

struct ForwardVars {
  Var yhat;
  Var joint;
  Var alpha;  // invalid in concat mode
};

ForwardVars forward_example(Tape& tape, const MultiChannelGraph& example, const ParamVars& pv,
                            const RunConfig& cfg);

}  // namespace reid

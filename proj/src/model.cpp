#include "reid/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "reid/fs_util.hpp"

namespace reid {

using nlohmann::json;

std::vector<Tensor*> ModelParams::tensors() {
  std::vector<Tensor*> out;
  for (auto& ch : enc)
    for (auto& w : ch.weights) out.push_back(&w);
  out.push_back(&att.wa);
  out.push_back(&att.a);
  out.push_back(&clf_w);
  out.push_back(&clf_b);
  return out;
}

std::vector<const Tensor*> ModelParams::tensors() const {
  std::vector<const Tensor*> out;
  for (const auto& ch : enc)
    for (const auto& w : ch.weights) out.push_back(&w);
  out.push_back(&att.wa);
  out.push_back(&att.a);
  out.push_back(&clf_w);
  out.push_back(&clf_b);
  return out;
}

ModelParams init_model_params(const RunConfig& cfg) {
  cfg.validate();
  ModelParams p;
  const EncoderConfig enc_cfg = cfg.encoder();
  for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
    Rng rng = Rng::stream(cfg.seed, "init.enc", c);
    p.enc.push_back(init_channel_encoder(cfg.input_dim(), enc_cfg, rng));
  }
  Rng att_rng = Rng::stream(cfg.seed, "init.att");
  p.att = init_attention(cfg.hidden_dim, cfg.hidden_dim, att_rng);
  Rng clf_rng = Rng::stream(cfg.seed, "init.clf");
  p.clf_w = glorot_uniform(1, cfg.joint_dim(), clf_rng);
  p.clf_b = Tensor::scalar(0.0);
  return p;
}

ParamVars lift_params(Tape& tape, const ModelParams& params, bool requires_grad) {
  auto lift = [&](const Tensor& t) { return requires_grad ? tape.param(t) : tape.constant(t); };
  ParamVars pv;
  for (const auto& ch : params.enc) {
    std::vector<Var> ws;
    for (const auto& w : ch.weights) {
      ws.push_back(lift(w));
      pv.flat.push_back(ws.back());
    }
    pv.enc.push_back(std::move(ws));
  }
  pv.wa = lift(params.att.wa);
  pv.a = lift(params.att.a);
  pv.w = lift(params.clf_w);
  pv.b = lift(params.clf_b);
  pv.flat.push_back(pv.wa);
  pv.flat.push_back(pv.a);
  pv.flat.push_back(pv.w);
  pv.flat.push_back(pv.b);
  return pv;
}

ForwardVars forward_example(Tape& tape, const MultiChannelGraph& example, const ParamVars& pv,
                            const RunConfig& cfg) {
  if (example.channels.size() != cfg.channels.size() ||
      example.features.size() != example.channels.size())
    throw Error(Errc::shape_mismatch, "example channels do not match config");
  const EncoderConfig enc_cfg = cfg.encoder();
  std::vector<Var> embeddings;
  embeddings.reserve(example.channels.size());
  for (std::size_t c = 0; c < example.channels.size(); ++c)
    embeddings.push_back(
        cge_forward(tape, example.channels[c], example.features[c], pv.enc[c], enc_cfg));

  ForwardVars out;
  if (cfg.fusion == Fusion::Attention) {
    const AttentionOut att = attention_fuse(tape, embeddings, pv.wa, pv.a);
    out.alpha = att.alpha;
    out.joint = att.joint;
  } else {
    out.joint = concat_fuse(tape, embeddings);
  }
  out.yhat = tape.sigmoid(tape.add(tape.dot(pv.w, out.joint), pv.b));
  return out;
}

Prediction predict(const MultiChannelGraph& example, const ModelParams& params,
                   const RunConfig& cfg) {
  Tape tape;
  const ParamVars pv = lift_params(tape, params, false);
  const ForwardVars fv = forward_example(tape, example, pv, cfg);
  Prediction p;
  p.yhat = tape.value(fv.yhat).scalar_value();
  p.joint = tape.value(fv.joint).data();
  if (fv.alpha.valid()) p.alpha = tape.value(fv.alpha).data();
  return p;
}

int decide(double yhat) { return yhat >= 0.5 ? +1 : -1; }

double bce_loss(const std::vector<double>& yhat, const std::vector<int>& labels) {
  if (yhat.size() != labels.size() || yhat.empty())
    throw Error(Errc::length_mismatch, "prediction/label lengths differ or empty");
  const double lo = Tape::kProbClamp;
  const double hi = 1.0 - Tape::kProbClamp;
  double loss = 0.0;
  for (std::size_t i = 0; i < yhat.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1)
      throw Error(Errc::label_out_of_range, "labels must be +1 or -1");
    const double y = labels[i] == 1 ? 1.0 : 0.0;
    const double p = std::min(hi, std::max(lo, yhat[i]));
    loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return loss / static_cast<double>(yhat.size());
}

AdamState init_adam_state(const ModelParams& params) {
  AdamState s;
  for (const Tensor* t : params.tensors()) {
    s.m.emplace_back(t->rows(), t->cols());
    s.v.emplace_back(t->rows(), t->cols());
  }
  return s;
}

void adam_step(ModelParams& params, const std::vector<Tensor>& grads, AdamState& state, int t,
               const RunConfig& cfg) {
  if (t < 1) throw Error(Errc::shape_mismatch, "adam step index starts at 1");
  std::vector<Tensor*> ps = params.tensors();
  if (grads.size() != ps.size() || state.m.size() != ps.size())
    throw Error(Errc::length_mismatch, "gradient/state lists do not match parameters");
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Tensor& p = *ps[i];
    if (!grads[i].same_shape(p)) throw Error(Errc::shape_mismatch, "gradient shape");
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double g = grads[i][k];
      state.m[i][k] = cfg.beta1 * state.m[i][k] + (1.0 - cfg.beta1) * g;
      state.v[i][k] = cfg.beta2 * state.v[i][k] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = state.m[i][k] / c1;
      const double v_hat = state.v[i][k] / c2;
      p[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
      if (!std::isfinite(p[k]))
        throw Error(Errc::non_finite, "parameter diverged at adam step " + std::to_string(t));
    }
  }
}

TrainedModel train(const std::vector<MultiChannelGraph>& dataset, const RunConfig& cfg,
                   const std::string& claimed_id) {
  cfg.validate();
  if (dataset.empty()) throw Error(Errc::empty_dataset, "training dataset is empty");
  std::vector<double> y01;
  y01.reserve(dataset.size());
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& ex : dataset) {
    if (!ex.label || (*ex.label != 1 && *ex.label != -1))
      throw Error(Errc::label_out_of_range, "training examples need labels in {+1,-1}");
    y01.push_back(*ex.label == 1 ? 1.0 : 0.0);
    (*ex.label == 1 ? has_pos : has_neg) = true;
  }

  TrainedModel model;
  model.config = cfg;
  model.claimed_id = claimed_id;
  model.params = init_model_params(cfg);
  model.single_class_warning = !(has_pos && has_neg);
  if (model.single_class_warning)
    std::fprintf(stderr, "warning: single-class dataset for '%s'\n", claimed_id.c_str());

  AdamState state = init_adam_state(model.params);
  int perfect_streak = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Tape tape;
    const ParamVars pv = lift_params(tape, model.params, true);
    std::vector<Var> yhat_vars;
    yhat_vars.reserve(dataset.size());
    for (const auto& ex : dataset)
      yhat_vars.push_back(forward_example(tape, ex, pv, cfg).yhat);

    int correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const double yhat = tape.value(yhat_vars[i]).scalar_value();
      if (decide(yhat) == *dataset[i].label) ++correct;
    }
    const Var loss = tape.bce_mean(yhat_vars, y01);
    const double loss_value = tape.value(loss).scalar_value();
    const double acc = static_cast<double>(correct) / dataset.size();
    model.history.push_back({loss_value, acc});

    perfect_streak = acc == 1.0 ? perfect_streak + 1 : 0;
    if (perfect_streak >= cfg.patience) break;

    const std::vector<Tensor> grads = tape.backward(loss, pv.flat);
    adam_step(model.params, grads, state, epoch, cfg);
  }
  return model;
}

namespace {

json tensor_to_json(const Tensor& t) {
  json rows = json::array();
  for (int r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < t.cols(); ++c) row.push_back(t.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Tensor tensor_from_json(const json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw Error(Errc::shape_mismatch, std::string(what) + ": row count");
  Tensor t(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw Error(Errc::shape_mismatch, std::string(what) + ": column count");
    for (int c = 0; c < cols; ++c) t.at(r, c) = row.at(c).get<double>();
  }
  t.check_finite(what);
  return t;
}

json vector_to_json(const Tensor& t) {
  json out = json::array();
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t[i]);
  return out;
}

Tensor vector_from_json(const json& j, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != cols)
    throw Error(Errc::shape_mismatch, std::string(what) + ": length");
  Tensor t(1, cols);
  for (int c = 0; c < cols; ++c) t[c] = j.at(c).get<double>();
  t.check_finite(what);
  return t;
}

constexpr int kCheckpointSchema = 1;

}  // namespace

void save_model(const TrainedModel& model, const std::string& path) {
  json j;
  j["schema"] = kCheckpointSchema;
  j["claimed_id"] = model.claimed_id;
  j["config"] = json::parse(config_to_json(model.config));
  json channels = json::array();
  for (MetaPath p : model.config.channels) channels.push_back(meta_path_name(p));
  j["channels"] = std::move(channels);

  json enc;
  for (std::size_t c = 0; c < model.params.enc.size(); ++c) {
    json ws;
    for (std::size_t l = 0; l < model.params.enc[c].weights.size(); ++l)
      ws["W" + std::to_string(l)] = tensor_to_json(model.params.enc[c].weights[l]);
    enc[meta_path_name(model.config.channels[c])] = std::move(ws);
  }
  j["params"] = {{"enc", std::move(enc)},
                 {"att", {{"Wa", tensor_to_json(model.params.att.wa)},
                          {"a", vector_to_json(model.params.att.a)}}},
                 {"clf", {{"w", vector_to_json(model.params.clf_w)},
                          {"b", model.params.clf_b.scalar_value()}}}};

  json history = json::array();
  for (const auto& h : model.history) history.push_back({{"loss", h.loss}, {"acc", h.acc}});
  j["history"] = std::move(history);
  j["single_class_warning"] = model.single_class_warning;

  atomic_write_file(path, j.dump(2) + "\n");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw Error(Errc::malformed_line, "checkpoint is not valid JSON");
  }
  if (!j.contains("schema") || !j["schema"].is_number_integer() ||
      j["schema"].get<int>() != kCheckpointSchema)
    throw Error(Errc::schema_version_mismatch,
                "checkpoint schema is not " + std::to_string(kCheckpointSchema));

  TrainedModel model;
  try {
    model.claimed_id = j.at("claimed_id").get<std::string>();
    model.config = config_from_json(j.at("config").dump());
    const auto& params = j.at("params");
    const int d_in = model.config.input_dim();
    const int h = model.config.hidden_dim;
    for (std::size_t c = 0; c < model.config.channels.size(); ++c) {
      const auto& ws = params.at("enc").at(meta_path_name(model.config.channels[c]));
      ChannelEncoderParams cep;
      for (int l = 0; l < model.config.n_layers; ++l)
        cep.weights.push_back(tensor_from_json(ws.at("W" + std::to_string(l)),
                                               l == 0 ? d_in : h, h, "encoder weight"));
      model.params.enc.push_back(std::move(cep));
    }
    model.params.att.wa = tensor_from_json(params.at("att").at("Wa"), h, h, "Wa");
    model.params.att.a = vector_from_json(params.at("att").at("a"), 2 * h, "a");
    model.params.clf_w = vector_from_json(params.at("clf").at("w"), model.config.joint_dim(), "w");
    model.params.clf_b = Tensor::scalar(params.at("clf").at("b").get<double>());
    for (const auto& hrec : j.at("history"))
      model.history.push_back({hrec.at("loss").get<double>(), hrec.at("acc").get<double>()});
    model.single_class_warning = j.at("single_class_warning").get<bool>();
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line, std::string("checkpoint schema: ") + e.what());
  }
  return model;
}

}  // namespace reid

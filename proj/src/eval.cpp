#include "reid/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace reid {

using nlohmann::json;

EvalReport confusion_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                             double threshold) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error(Errc::length_mismatch, "scores/labels lengths differ or empty");
  EvalReport r;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1 && labels[i] != -1)
      throw Error(Errc::label_out_of_range, "labels must be +1 or -1");
    const bool predicted_pos = scores[i] >= threshold;  // tie -> positive
    const bool actual_pos = labels[i] == 1;
    if (predicted_pos && actual_pos) ++r.tp;
    else if (predicted_pos && !actual_pos) ++r.fp;
    else if (!predicted_pos && !actual_pos) ++r.tn;
    else ++r.fn;
  }
  const double m = static_cast<double>(scores.size());
  r.acc = (r.tp + r.tn) / m;
  r.precision_defined = r.tp + r.fp > 0;
  r.precision = r.precision_defined ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
  r.recall_defined = r.tp + r.fn > 0;
  r.recall = r.recall_defined ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
  r.tpr = r.recall;
  r.fpr = r.fp + r.tn > 0 ? static_cast<double>(r.fp) / (r.fp + r.tn) : 0.0;
  r.f1_defined = r.precision + r.recall > 0.0;
  r.f1 = r.f1_defined ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error(Errc::length_mismatch, "scores/labels lengths differ or empty");
  const int n = static_cast<int>(scores.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });

  // Twice the average rank per element; integer, so tie handling is exact.
  std::vector<std::int64_t> rank2(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (int k = i; k <= j; ++k) rank2[order[k]] = static_cast<std::int64_t>(i) + j + 2;
    i = j + 1;
  }

  std::int64_t n_pos = 0;
  std::int64_t rank2_pos = 0;
  for (int k = 0; k < n; ++k) {
    if (labels[k] != 1 && labels[k] != -1)
      throw Error(Errc::label_out_of_range, "labels must be +1 or -1");
    if (labels[k] == 1) {
      ++n_pos;
      rank2_pos += rank2[k];
    }
  }
  const std::int64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw Error(Errc::one_class_only, "AUC needs both classes");
  const std::int64_t u2 = rank2_pos - n_pos * (n_pos + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

DetectionRates detection_rates(const std::vector<double>& scores, const std::vector<int>& labels,
                               double threshold) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error(Errc::length_mismatch, "scores/labels lengths differ or empty");
  std::int64_t attacks = 0, flagged_attacks = 0, genuine = 0, flagged_genuine = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool alert = scores[i] < threshold;  // -1 decision
    if (labels[i] == -1) {
      ++attacks;
      if (alert) ++flagged_attacks;
    } else {
      ++genuine;
      if (alert) ++flagged_genuine;
    }
  }
  DetectionRates d;
  d.tpr = attacks > 0 ? static_cast<double>(flagged_attacks) / attacks : 0.0;
  d.fpr = genuine > 0 ? static_cast<double>(flagged_genuine) / genuine : 0.0;
  return d;
}

std::vector<Fold> kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(Errc::bad_config, "k must be >= 2");
  if (static_cast<int>(labels.size()) < k)
    throw Error(Errc::too_few_examples,
                std::to_string(labels.size()) + " examples for " + std::to_string(k) + " folds");

  // Shuffle each class separately, then deal round-robin so every fold
  // keeps the class mix.
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    (labels[i] == 1 ? pos : neg).push_back(i);
  Rng pos_rng = Rng::stream(seed, "kfold.pos");
  Rng neg_rng = Rng::stream(seed, "kfold.neg");
  pos_rng.shuffle(pos);
  neg_rng.shuffle(neg);

  std::vector<std::vector<int>> test_sets(k);
  int cursor = 0;
  for (int idx : pos) test_sets[cursor++ % k].push_back(idx);
  for (int idx : neg) test_sets[cursor++ % k].push_back(idx);

  std::vector<Fold> folds(k);
  for (int f = 0; f < k; ++f) {
    std::sort(test_sets[f].begin(), test_sets[f].end());
    folds[f].test = test_sets[f];
    for (int i = 0; i < static_cast<int>(labels.size()); ++i)
      if (!std::binary_search(test_sets[f].begin(), test_sets[f].end(), i))
        folds[f].train.push_back(i);
  }
  return folds;
}

MultiChannelGraph make_example(const BehaviorGraph& g, const RunConfig& cfg,
                               std::optional<int> label) {
  MultiChannelGraph mcg = transform_multichannel(g, cfg.channels);
  assemble_features(g, mcg, cfg.feature_config());
  mcg.label = label;
  return mcg;
}

std::vector<LabeledGraph> build_program_dataset(const std::vector<ProgramWindows>& corpus,
                                                const std::string& target, std::uint64_t seed) {
  const ProgramWindows* own = nullptr;
  for (const auto& p : corpus)
    if (p.program == target) own = &p;
  if (!own) throw Error(Errc::unknown_victim, "no windows for program '" + target + "'");

  std::vector<LabeledGraph> dataset;
  for (const auto& g : own->windows) dataset.push_back({g, +1});

  std::vector<const BehaviorGraph*> others;
  for (const auto& p : corpus) {
    if (p.program == target) continue;
    for (const auto& g : p.windows) others.push_back(&g);
  }
  Rng rng = Rng::stream(seed, "negatives." + target);
  rng.shuffle(others);
  const std::size_t want = std::min(others.size(), own->windows.size());
  for (std::size_t i = 0; i < want; ++i)
    dataset.push_back({others[i]->with_claim(target), -1});
  return dataset;
}

EvalReport evaluate_model(const TrainedModel& model, const std::vector<MultiChannelGraph>& tests) {
  if (tests.empty()) throw Error(Errc::empty_dataset, "no test examples");
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<double> alpha_sum;
  for (const auto& ex : tests) {
    if (!ex.label) throw Error(Errc::label_out_of_range, "test examples need labels");
    const Prediction p = predict(ex, model.params, model.config);
    scores.push_back(p.yhat);
    labels.push_back(*ex.label);
    if (!p.alpha.empty()) {
      if (alpha_sum.empty()) alpha_sum.assign(p.alpha.size(), 0.0);
      for (std::size_t c = 0; c < p.alpha.size(); ++c) alpha_sum[c] += p.alpha[c];
    }
  }
  EvalReport r = confusion_metrics(scores, labels);
  const bool two_class = r.tp + r.fn > 0 && r.fp + r.tn > 0;
  if (two_class) {
    r.auc = auc(scores, labels);
    r.auc_defined = true;
  }
  for (double s : alpha_sum) r.per_channel_attention_mean.push_back(s / tests.size());
  return r;
}

namespace {

EvalReport average_reports(const std::vector<EvalReport>& reports) {
  EvalReport avg;
  if (reports.empty()) return avg;
  int auc_count = 0;
  for (const auto& r : reports) {
    avg.tp += r.tp;
    avg.fp += r.fp;
    avg.tn += r.tn;
    avg.fn += r.fn;
    avg.acc += r.acc;
    avg.precision += r.precision;
    avg.recall += r.recall;
    avg.f1 += r.f1;
    avg.tpr += r.tpr;
    avg.fpr += r.fpr;
    if (r.auc_defined) {
      avg.auc += r.auc;
      ++auc_count;
    }
    if (!r.per_channel_attention_mean.empty()) {
      if (avg.per_channel_attention_mean.empty())
        avg.per_channel_attention_mean.assign(r.per_channel_attention_mean.size(), 0.0);
      for (std::size_t c = 0; c < r.per_channel_attention_mean.size(); ++c)
        avg.per_channel_attention_mean[c] += r.per_channel_attention_mean[c];
    }
  }
  const double n = static_cast<double>(reports.size());
  avg.acc /= n;
  avg.precision /= n;
  avg.recall /= n;
  avg.f1 /= n;
  avg.tpr /= n;
  avg.fpr /= n;
  if (auc_count > 0) {
    avg.auc /= auc_count;
    avg.auc_defined = true;
  }
  for (double& v : avg.per_channel_attention_mean) v /= n;
  return avg;
}

}  // namespace

EvalReport crossval_program(const std::vector<LabeledGraph>& dataset, const RunConfig& cfg,
                            const std::string& program, int k, std::uint64_t fold_seed) {
  std::vector<int> labels;
  for (const auto& lg : dataset) labels.push_back(lg.label);
  const std::vector<Fold> folds = kfold_split(labels, k, fold_seed);

  std::vector<MultiChannelGraph> examples;
  examples.reserve(dataset.size());
  for (const auto& lg : dataset) examples.push_back(make_example(lg.graph, cfg, lg.label));

  std::vector<EvalReport> fold_reports;
  for (const Fold& fold : folds) {
    std::vector<MultiChannelGraph> train_set, test_set;
    for (int i : fold.train) train_set.push_back(examples[i]);
    for (int i : fold.test) test_set.push_back(examples[i]);
    const TrainedModel model = train(train_set, cfg, program);
    fold_reports.push_back(evaluate_model(model, test_set));
  }
  return average_reports(fold_reports);
}

RunConfig Variant::apply(const RunConfig& base) const {
  RunConfig cfg = base;
  cfg.channels = channels;
  cfg.fusion = fusion;
  cfg.n_layers = n_layers;
  cfg.propagation = propagation;
  cfg.validate();
  return cfg;
}

std::vector<Variant> standard_variants(const RunConfig& base) {
  std::vector<Variant> out;
  for (MetaPath p : {MetaPath::PP, MetaPath::PF, MetaPath::PI}) {
    std::string name = meta_path_name(p);
    std::transform(name.begin(), name.end(), name.begin(), ::tolower);
    out.push_back({name, {p}, Fusion::Attention, base.n_layers, base.propagation});
  }
  out.push_back({"con", base.channels, Fusion::Concat, base.n_layers, base.propagation});
  out.push_back({"att", base.channels, Fusion::Attention, base.n_layers, base.propagation});
  return out;
}

std::vector<VariantResult> ablation_run(const std::vector<ProgramWindows>& corpus,
                                        const std::vector<Variant>& variants,
                                        const RunConfig& base, int k, std::uint64_t seed,
                                        int jobs) {
  if (variants.empty()) throw Error(Errc::bad_config, "no variants");
  if (corpus.size() < 2)
    throw Error(Errc::too_few_examples, "ablation needs at least two programs");

  // Shared per-program datasets; folds depend only on (seed, program), so
  // every variant sees identical splits.
  std::vector<std::vector<LabeledGraph>> datasets;
  datasets.reserve(corpus.size());
  for (const auto& p : corpus) datasets.push_back(build_program_dataset(corpus, p.program, seed));

  struct Task {
    std::size_t variant, program;
  };
  std::vector<Task> tasks;
  for (std::size_t v = 0; v < variants.size(); ++v)
    for (std::size_t p = 0; p < corpus.size(); ++p) tasks.push_back({v, p});

  std::vector<std::vector<EvalReport>> reports(variants.size(),
                                               std::vector<EvalReport>(corpus.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        const Task& t = tasks[i];
        const RunConfig cfg = variants[t.variant].apply(base);
        reports[t.variant][t.program] =
            crossval_program(datasets[t.program], cfg, corpus[t.program].program, k,
                             Rng::stream(seed, "folds", t.program).next_u64());
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<VariantResult> results;
  for (std::size_t v = 0; v < variants.size(); ++v)
    results.push_back({variants[v], average_reports(reports[v]), reports[v]});
  return results;
}

namespace {

json report_to_json_obj(const EvalReport& r) {
  json j;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["tn"] = r.tn;
  j["fn"] = r.fn;
  j["acc"] = r.acc;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["auc"] = r.auc;
  j["tpr"] = r.tpr;
  j["fpr"] = r.fpr;
  j["precision_defined"] = r.precision_defined;
  j["recall_defined"] = r.recall_defined;
  j["f1_defined"] = r.f1_defined;
  j["auc_defined"] = r.auc_defined;
  j["per_channel_attention_mean"] = r.per_channel_attention_mean;
  return j;
}

}  // namespace

std::string EvalReport::to_json() const { return report_to_json_obj(*this).dump(2); }

std::string EvalReport::to_table() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "tp %lld  fp %lld  tn %lld  fn %lld\n"
                "acc %.4f  precision %.4f  recall %.4f  f1 %.4f  auc %.4f\n"
                "tpr %.4f  fpr %.4f\n",
                static_cast<long long>(tp), static_cast<long long>(fp),
                static_cast<long long>(tn), static_cast<long long>(fn), acc, precision, recall,
                f1, auc, tpr, fpr);
  return buf;
}

std::string ablation_to_json(const std::vector<VariantResult>& results) {
  json rows = json::array();
  for (const auto& r : results) {
    json row;
    row["variant"] = r.variant.name;
    json channels = json::array();
    for (MetaPath p : r.variant.channels) channels.push_back(meta_path_name(p));
    row["channels"] = std::move(channels);
    row["fusion"] = fusion_name(r.variant.fusion);
    row["n_layers"] = r.variant.n_layers;
    row["propagation"] = propagation_name(r.variant.propagation);
    row["macro"] = report_to_json_obj(r.macro);
    json per = json::array();
    for (const auto& pr : r.per_program) per.push_back(report_to_json_obj(pr));
    row["per_program"] = std::move(per);
    rows.push_back(std::move(row));
  }
  return json{{"variants", rows}}.dump(2);
}

std::string ablation_to_table(const std::vector<VariantResult>& results) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %8s %8s %8s %8s %8s\n", "variant", "acc", "f1", "auc",
                "precision", "recall");
  out << buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%-10s %8.4f %8.4f %8.4f %8.4f %8.4f\n",
                  r.variant.name.c_str(), r.macro.acc, r.macro.f1, r.macro.auc,
                  r.macro.precision, r.macro.recall);
    out << buf;
  }
  return out.str();
}

}  // namespace reid

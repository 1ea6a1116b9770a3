#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reid/config.hpp"
#include "reid/graph.hpp"
#include "reid/model.hpp"

namespace reid {

// Confusion counts plus derived metrics. Positive class is the genuine
// program (+1). Undefined ratios (empty denominators) are reported as 0
// with their *_defined flag cleared.
struct EvalReport {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double acc = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
  double tpr = 0.0;  // = recall
  double fpr = 0.0;
  bool precision_defined = true;
  bool recall_defined = true;
  bool f1_defined = true;
  bool auc_defined = false;
  std::vector<double> per_channel_attention_mean;

  std::string to_json() const;
  std::string to_table() const;
};

// Threshold rule: score >= threshold predicts +1. AUC left unfilled.
EvalReport confusion_metrics(const std::vector<double>& scores, const std::vector<int>& labels,
                             double threshold = 0.5);

// Mann-Whitney AUC, tie-aware (ties count 1/2). Exact: the rank-sum
// numerator is integer arithmetic. Errors: one_class_only.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Attack-oriented rates for disguise detection: an "alert" is a -1
// decision, attacks are the -1 labels.
struct DetectionRates {
  double tpr = 0.0;  // attack windows flagged
  double fpr = 0.0;  // genuine windows flagged
};
DetectionRates detection_rates(const std::vector<double>& scores, const std::vector<int>& labels,
                               double threshold = 0.5);

struct Fold {
  std::vector<int> train;
  std::vector<int> test;
};

// Stratified k-fold over labels; folds are disjoint, exhaustive and
// deterministic per seed. Errors: too_few_examples.
std::vector<Fold> kfold_split(const std::vector<int>& labels, int k, std::uint64_t seed);

// ---- evaluation protocol over behavior-graph corpora ----

struct LabeledGraph {
  BehaviorGraph graph;
  int label = 1;
};

struct ProgramWindows {
  std::string program;
  std::vector<BehaviorGraph> windows;
};

// Builds one mcg example (channels + features) from a graph under a config.
MultiChannelGraph make_example(const BehaviorGraph& g, const RunConfig& cfg,
                               std::optional<int> label);

// Training set for `target`: its windows as +1, a seeded 1:1 subsample of
// the other programs' windows re-claimed as `target` as -1.
std::vector<LabeledGraph> build_program_dataset(const std::vector<ProgramWindows>& corpus,
                                                const std::string& target, std::uint64_t seed);

// Scores a frozen model over a test set; fills AUC and attention means.
EvalReport evaluate_model(const TrainedModel& model, const std::vector<MultiChannelGraph>& tests);

// k-fold cross-validation of one program's labeled graphs: train on each
// fold complement, evaluate on the fold, average the fold reports.
EvalReport crossval_program(const std::vector<LabeledGraph>& dataset, const RunConfig& cfg,
                            const std::string& program, int k, std::uint64_t fold_seed);

// One ablation row: a named override of the fusion-relevant config fields.
struct Variant {
  std::string name;
  std::vector<MetaPath> channels;
  Fusion fusion = Fusion::Attention;
  int n_layers = 3;
  Propagation propagation = Propagation::Diffusion;

  RunConfig apply(const RunConfig& base) const;
};

// pp / pf / pi single channels, concat, attention — all at base depth.
std::vector<Variant> standard_variants(const RunConfig& base);

struct VariantResult {
  Variant variant;
  EvalReport macro;                      // averaged over programs
  std::vector<EvalReport> per_program;   // aligned with corpus order
};

// Trains and evaluates every variant on every program under identical
// folds and seeds. `jobs` bounds the worker threads (tasks are
// independent; results are deterministic regardless of scheduling).
std::vector<VariantResult> ablation_run(const std::vector<ProgramWindows>& corpus,
                                        const std::vector<Variant>& variants,
                                        const RunConfig& base, int k, std::uint64_t seed,
                                        int jobs = 1);

std::string ablation_to_json(const std::vector<VariantResult>& results);
std::string ablation_to_table(const std::vector<VariantResult>& results);

}  // namespace reid

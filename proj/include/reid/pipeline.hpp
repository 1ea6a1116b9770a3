#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reid/config.hpp"
#include "reid/eval.hpp"
#include "reid/fs_util.hpp"
#include "reid/graph.hpp"
#include "reid/model.hpp"
#include "reid/synth.hpp"

namespace reid {

// ---- corpus manifest (cmd_gen output) ----

struct ManifestEntry {
  std::string path;  // events JSONL, relative to the manifest directory
  std::string claimed_id;
  std::pair<std::int64_t, std::int64_t> window;
  int label = +1;
  std::string tag;
};

void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path);
std::vector<ManifestEntry> load_manifest(const std::string& path);

// ---- serialized examples (cmd_ingest output) ----

struct StoredExample {
  std::string id;
  BehaviorGraph graph;
  MultiChannelGraph mcg;
  std::string tag;
};

void save_example(const StoredExample& ex, const FeatureConfig& fcfg, const std::string& path);
StoredExample load_example(const std::string& path);

// All *.json examples in a directory, sorted by filename.
std::vector<StoredExample> load_examples_dir(const std::string& dir);

// Behavior graphs per labeled window; windows that cannot produce a graph
// (no events, or the claimed program absent) are skipped when
// `skip_unbuildable` is set, otherwise they raise.
struct BuiltWindow {
  LabeledWindow window;
  BehaviorGraph graph;
};
std::vector<BuiltWindow> build_windows(const std::vector<LabeledWindow>& windows,
                                       const RunConfig& cfg, bool skip_unbuildable,
                                       int* skipped = nullptr);

// Genuine examples grouped per program (attack windows excluded).
std::vector<ProgramWindows> corpus_from_examples(const std::vector<StoredExample>& examples);

// ---- command cores (the CLI is a thin wrapper over these) ----

struct GenOptions {
  std::string profiles_path;
  std::string scenarios_path;  // optional: empty = no attacks
  std::string out_dir;
  int windows = 10;
  std::int64_t window_len = 86400;
  std::uint64_t seed = 7;
};
void cmd_gen(const GenOptions& opt);

struct IngestOptions {
  std::string manifest_path;
  std::string out_dir;
  RunConfig cfg;
  bool skip_bad_lines = false;
  bool skip_unbuildable = false;
};
void cmd_ingest(const IngestOptions& opt);

struct TrainOptions {
  std::string examples_dir;
  std::string program;
  RunConfig cfg;
  std::string model_out;
};
void cmd_train(const TrainOptions& opt);

struct EvalOptions {
  std::string examples_dir;
  std::string program;  // required unless ablation
  RunConfig cfg;
  int kfold = 5;
  bool ablation = false;
  int jobs = 1;
  std::string format = "json";  // json | table
  std::string out;              // empty = stdout
};
std::string cmd_eval(const EvalOptions& opt);  // returns the report text

struct DetectOptions {
  std::string model_path;
  std::string examples_dir;
  std::string out;  // empty = stdout
};
std::string cmd_detect(const DetectOptions& opt);

struct EmbedOptions {
  std::string model_path;
  std::string examples_dir;
  std::string out;
};
std::string cmd_embed(const EmbedOptions& opt);

}  // namespace reid

#include "reid/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reid {

namespace fs = std::filesystem;
using nlohmann::json;

void save_manifest(const std::vector<ManifestEntry>& entries, const std::string& path) {
  json j;
  j["schema"] = 1;
  json rows = json::array();
  for (const auto& e : entries)
    rows.push_back({{"path", e.path},
                    {"claimed_id", e.claimed_id},
                    {"window", {e.window.first, e.window.second}},
                    {"label", e.label},
                    {"tag", e.tag}});
  j["windows"] = std::move(rows);
  atomic_write_file(path, j.dump(2) + "\n");
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open manifest '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw Error(Errc::malformed_line, "manifest is not valid JSON");
  }
  std::vector<ManifestEntry> out;
  try {
    if (j.at("schema").get<int>() != 1)
      throw Error(Errc::schema_version_mismatch, "manifest schema is not 1");
    for (const auto& row : j.at("windows")) {
      ManifestEntry e;
      e.path = row.at("path").get<std::string>();
      e.claimed_id = row.at("claimed_id").get<std::string>();
      e.window = {row.at("window").at(0).get<std::int64_t>(),
                  row.at("window").at(1).get<std::int64_t>()};
      e.label = row.at("label").get<int>();
      e.tag = row.at("tag").get<std::string>();
      out.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line, std::string("manifest schema: ") + e.what());
  }
  return out;
}

void save_example(const StoredExample& ex, const FeatureConfig& fcfg, const std::string& path) {
  json j;
  j["schema"] = 1;
  j["id"] = ex.id;
  j["claimed_id"] = ex.mcg.claimed_id;
  j["label"] = ex.mcg.label ? json(*ex.mcg.label) : json(nullptr);
  j["tag"] = ex.tag;
  j["graph"] = json::parse(ex.graph.to_json());
  json channels = json::array();
  json channel_nodes;
  json features;
  for (std::size_t c = 0; c < ex.mcg.paths.size(); ++c) {
    const char* name = meta_path_name(ex.mcg.paths[c]);
    channels.push_back(name);
    channel_nodes[name] = ex.mcg.channels[c].node_ids;
    json rows = json::array();
    const Tensor& x = ex.mcg.features[c];
    for (int r = 0; r < x.rows(); ++r) {
      json row = json::array();
      for (int col = 0; col < x.cols(); ++col) row.push_back(x.at(r, col));
      rows.push_back(std::move(row));
    }
    features[name] = std::move(rows);
  }
  j["channels"] = std::move(channels);
  j["channel_nodes"] = std::move(channel_nodes);
  j["features"] = std::move(features);
  j["feature_config"] = {{"d_con", fcfg.d_con}, {"feature_set", feature_set_name(fcfg.set)}};
  atomic_write_file(path, j.dump() + "\n");
}

StoredExample load_example(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open example '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    throw Error(Errc::malformed_line, "example is not valid JSON");
  }
  try {
    if (j.at("schema").get<int>() != 1)
      throw Error(Errc::schema_version_mismatch, "example schema is not 1");
    BehaviorGraph graph = BehaviorGraph::from_json(j.at("graph").dump());

    std::vector<MetaPath> paths;
    for (const auto& c : j.at("channels")) paths.push_back(meta_path_from(c));
    MultiChannelGraph mcg = transform_multichannel(graph, paths);
    if (!j.at("label").is_null()) mcg.label = j.at("label").get<int>();

    for (std::size_t c = 0; c < paths.size(); ++c) {
      const char* name = meta_path_name(paths[c]);
      const auto stored_nodes = j.at("channel_nodes").at(name).get<std::vector<int>>();
      if (stored_nodes != mcg.channels[c].node_ids)
        throw Error(Errc::shape_mismatch,
                    std::string("channel ") + name + " no longer matches its graph");
      const auto& rows = j.at("features").at(name);
      const int n = static_cast<int>(rows.size());
      if (n != static_cast<int>(mcg.channels[c].node_ids.size()))
        throw Error(Errc::shape_mismatch, std::string("feature rows for channel ") + name);
      const int width = n > 0 ? static_cast<int>(rows.at(0).size()) : 0;
      Tensor x(n, width);
      for (int r = 0; r < n; ++r)
        for (int col = 0; col < width; ++col) x.at(r, col) = rows.at(r).at(col).get<double>();
      mcg.features.push_back(std::move(x));
    }

    StoredExample ex{j.at("id").get<std::string>(), std::move(graph), std::move(mcg),
                     j.at("tag").get<std::string>()};
    return ex;
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_line, std::string("example schema: ") + e.what());
  }
}

std::vector<StoredExample> load_examples_dir(const std::string& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::io, "'" + dir + "' is not a directory");
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
    if (entry.path().filename() == "index.json") continue;
    paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<StoredExample> out;
  out.reserve(paths.size());
  for (const auto& p : paths) out.push_back(load_example(p));
  return out;
}

std::vector<BuiltWindow> build_windows(const std::vector<LabeledWindow>& windows,
                                       const RunConfig& cfg, bool skip_unbuildable,
                                       int* skipped) {
  std::vector<BuiltWindow> out;
  int skip_count = 0;
  for (const auto& w : windows) {
    try {
      out.push_back({w, build_behavior_graph(w.events, w.claimed_id, w.window, cfg.hops)});
    } catch (const Error& err) {
      const bool benign =
          err.code() == Errc::empty_window || err.code() == Errc::target_absent;
      if (!skip_unbuildable || !benign) throw;
      ++skip_count;
    }
  }
  if (skipped) *skipped = skip_count;
  return out;
}

std::vector<ProgramWindows> corpus_from_examples(const std::vector<StoredExample>& examples) {
  std::vector<ProgramWindows> corpus;
  for (const auto& ex : examples) {
    if (ex.mcg.label != 1) continue;
    auto it = std::find_if(corpus.begin(), corpus.end(),
                           [&](const ProgramWindows& p) { return p.program == ex.mcg.claimed_id; });
    if (it == corpus.end()) {
      corpus.push_back({ex.mcg.claimed_id, {}});
      it = corpus.end() - 1;
    }
    it->windows.push_back(ex.graph);
  }
  return corpus;
}

// ---- commands ----

void cmd_gen(const GenOptions& opt) {
  const std::vector<ProgramProfile> profiles = load_profiles(opt.profiles_path);
  std::vector<LabeledWindow> windows = gen_corpus(profiles, opt.windows, opt.seed, opt.window_len);
  if (!opt.scenarios_path.empty()) {
    for (const auto& scenario : load_scenarios(opt.scenarios_path)) {
      std::vector<LabeledWindow> attacks =
          inject_disguise(profiles, windows, scenario, opt.seed, opt.window_len);
      windows.insert(windows.end(), attacks.begin(), attacks.end());
    }
  }

  fs::create_directories(fs::path(opt.out_dir) / "events");
  std::vector<ManifestEntry> manifest;
  for (const auto& w : windows) {
    const std::string rel = "events/" + w.id() + ".jsonl";
    std::ostringstream lines;
    for (const auto& e : w.events) lines << serialize_event(e) << '\n';
    atomic_write_file((fs::path(opt.out_dir) / rel).string(), lines.str());
    manifest.push_back({rel, w.claimed_id, w.window, w.label, w.tag});
  }
  save_manifest(manifest, (fs::path(opt.out_dir) / "manifest.json").string());
}

void cmd_ingest(const IngestOptions& opt) {
  const std::vector<ManifestEntry> manifest = load_manifest(opt.manifest_path);
  const fs::path base = fs::path(opt.manifest_path).parent_path();
  fs::create_directories(opt.out_dir);

  int skipped_windows = 0;
  std::vector<std::string> written;
  for (const auto& entry : manifest) {
    const std::string events_path = (base / entry.path).string();
    std::vector<SystemEvent> events;
    if (opt.skip_bad_lines) {
      const LenientReadResult r = read_event_stream_lenient(events_path);
      if (r.skipped > 0)
        std::fprintf(stderr, "warning: skipped %d bad lines in %s\n", r.skipped,
                     events_path.c_str());
      events = r.events;
    } else {
      events = read_event_stream(events_path);
    }

    std::optional<BehaviorGraph> graph;
    try {
      graph.emplace(build_behavior_graph(events, entry.claimed_id, entry.window, opt.cfg.hops));
    } catch (const Error& err) {
      const bool benign =
          err.code() == Errc::empty_window || err.code() == Errc::target_absent;
      if (opt.skip_unbuildable && benign) {
        ++skipped_windows;
        continue;
      }
      throw;
    }
    MultiChannelGraph mcg = make_example(*graph, opt.cfg, entry.label);
    StoredExample ex{fs::path(entry.path).stem().string(), std::move(*graph), std::move(mcg),
                     entry.tag};
    const std::string out_path = (fs::path(opt.out_dir) / (ex.id + ".json")).string();
    save_example(ex, opt.cfg.feature_config(), out_path);
    written.push_back(ex.id + ".json");
  }
  if (skipped_windows > 0)
    std::fprintf(stderr, "warning: skipped %d windows with no usable graph\n", skipped_windows);

  json index;
  index["schema"] = 1;
  std::sort(written.begin(), written.end());
  index["examples"] = written;
  index["config"] = json::parse(config_to_json(opt.cfg));
  atomic_write_file((fs::path(opt.out_dir) / "index.json").string(), index.dump(2) + "\n");
}

namespace {

// Per-program training dataset straight from an examples directory:
// genuine windows of `program` plus re-claimed windows of the others.
std::vector<MultiChannelGraph> dataset_for_program(const std::vector<StoredExample>& examples,
                                                   const std::string& program,
                                                   const RunConfig& cfg) {
  const std::vector<ProgramWindows> corpus = corpus_from_examples(examples);
  const std::vector<LabeledGraph> labeled = build_program_dataset(corpus, program, cfg.seed);
  std::vector<MultiChannelGraph> out;
  out.reserve(labeled.size());
  for (const auto& lg : labeled) out.push_back(make_example(lg.graph, cfg, lg.label));
  return out;
}

}  // namespace

void cmd_train(const TrainOptions& opt) {
  const std::vector<StoredExample> examples = load_examples_dir(opt.examples_dir);
  const std::vector<MultiChannelGraph> dataset =
      dataset_for_program(examples, opt.program, opt.cfg);
  const TrainedModel model = train(dataset, opt.cfg, opt.program);
  save_model(model, opt.model_out);
}

std::string cmd_eval(const EvalOptions& opt) {
  const std::vector<StoredExample> examples = load_examples_dir(opt.examples_dir);
  const std::vector<ProgramWindows> corpus = corpus_from_examples(examples);

  std::string text;
  if (opt.ablation) {
    const std::vector<VariantResult> results = ablation_run(
        corpus, standard_variants(opt.cfg), opt.cfg, opt.kfold, opt.cfg.seed, opt.jobs);
    text = opt.format == "table" ? ablation_to_table(results) : ablation_to_json(results);
  } else {
    if (opt.program.empty()) throw Error(Errc::bad_config, "eval needs --program or --ablation");
    const std::vector<LabeledGraph> dataset =
        build_program_dataset(corpus, opt.program, opt.cfg.seed);
    const EvalReport report =
        crossval_program(dataset, opt.cfg, opt.program, opt.kfold,
                         Rng::stream(opt.cfg.seed, "folds.single").next_u64());
    text = opt.format == "table" ? report.to_table() : report.to_json() + "\n";
  }
  if (!opt.out.empty()) atomic_write_file(opt.out, text);
  return text;
}

std::string cmd_detect(const DetectOptions& opt) {
  const TrainedModel model = load_model(opt.model_path);
  const std::vector<StoredExample> examples = load_examples_dir(opt.examples_dir);
  std::ostringstream out;
  for (const auto& ex : examples) {
    if (ex.mcg.claimed_id != model.claimed_id) continue;
    MultiChannelGraph mcg = make_example(ex.graph, model.config, ex.mcg.label);
    const Prediction p = predict(mcg, model.params, model.config);
    json line;
    line["example"] = ex.id;
    line["claimed_id"] = ex.mcg.claimed_id;
    line["score"] = p.yhat;
    line["decision"] = decide(p.yhat);
    out << line.dump() << '\n';
  }
  if (!opt.out.empty()) atomic_write_file(opt.out, out.str());
  return out.str();
}

std::string cmd_embed(const EmbedOptions& opt) {
  const TrainedModel model = load_model(opt.model_path);
  const std::vector<StoredExample> examples = load_examples_dir(opt.examples_dir);
  std::ostringstream out;
  bool header = false;
  for (const auto& ex : examples) {
    MultiChannelGraph mcg = make_example(ex.graph, model.config, ex.mcg.label);
    const Prediction p = predict(mcg, model.params, model.config);
    if (!header) {
      out << "example,claimed_id,label";
      for (std::size_t d = 0; d < p.joint.size(); ++d) out << ",h" << d;
      out << '\n';
      header = true;
    }
    out << ex.id << ',' << ex.mcg.claimed_id << ','
        << (ex.mcg.label ? std::to_string(*ex.mcg.label) : "");
    char buf[32];
    for (double v : p.joint) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << '\n';
  }
  if (!opt.out.empty()) atomic_write_file(opt.out, out.str());
  return out.str();
}

}  // namespace reid

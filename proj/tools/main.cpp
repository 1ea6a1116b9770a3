#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reid/error.hpp"
#include "reid/pipeline.hpp"

namespace {

// flags > file > defaults: the file is read first, then every --set pair
// and explicit flag lands on top of it.
reid::RunConfig resolve_config(const std::string& config_path,
                               const std::vector<std::string>& sets) {
  reid::RunConfig cfg;
  if (!config_path.empty()) cfg = reid::load_config_file(config_path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw reid::Error(reid::Errc::bad_config, "--set wants KEY=VALUE, got '" + kv + "'");
    reid::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

struct ConfigFlags {
  std::string path;
  std::vector<std::string> sets;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", path, "run config file (key = value lines)");
    cmd->add_option("--set", sets, "override one config key, e.g. --set seed=11")
        ->type_name("KEY=VALUE");
  }
  reid::RunConfig resolve() const { return resolve_config(path, sets); }
};

int exit_code_for(const reid::Error& e) {
  switch (e.code()) {
    case reid::Errc::bad_config:
    case reid::Errc::too_few_examples:
      return 2;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Program identity verification from system-behavior graphs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus (and attacks)");
  reid::GenOptions gen_opt;
  gen->add_option("--profiles", gen_opt.profiles_path, "program profiles JSON")->required();
  gen->add_option("--scenarios", gen_opt.scenarios_path, "attack scenarios JSON");
  gen->add_option("--out", gen_opt.out_dir, "output corpus directory")->required();
  gen->add_option("--windows", gen_opt.windows, "windows per program");
  gen->add_option("--window-len", gen_opt.window_len, "window length in seconds");
  gen->add_option("--seed", gen_opt.seed, "generator seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "events -> example graphs with features");
  reid::IngestOptions ingest_opt;
  ConfigFlags ingest_cfg;
  ingest->add_option("--manifest", ingest_opt.manifest_path, "corpus manifest.json")->required();
  ingest->add_option("--out", ingest_opt.out_dir, "examples output directory")->required();
  ingest->add_flag("--skip-bad", ingest_opt.skip_bad_lines,
                   "skip malformed event lines with a warning");
  ingest->add_flag("--skip-empty", ingest_opt.skip_unbuildable,
                   "skip windows that produce no usable graph");
  ingest_cfg.attach(ingest);

  // train
  auto* train_cmd = app.add_subcommand("train", "train one per-program verifier");
  reid::TrainOptions train_opt;
  ConfigFlags train_cfg;
  train_cmd->add_option("--examples", train_opt.examples_dir, "examples directory")->required();
  train_cmd->add_option("--program", train_opt.program, "claimed program id")->required();
  train_cmd->add_option("--out", train_opt.model_out, "model checkpoint path")->required();
  train_cfg.attach(train_cmd);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "cross-validated metrics / ablation table");
  reid::EvalOptions eval_opt;
  ConfigFlags eval_cfg;
  eval_cmd->add_option("--examples", eval_opt.examples_dir, "examples directory")->required();
  eval_cmd->add_option("--program", eval_opt.program, "program to evaluate");
  eval_cmd->add_option("--kfold", eval_opt.kfold, "number of folds");
  eval_cmd->add_flag("--ablation", eval_opt.ablation, "run the standard variant table");
  eval_cmd->add_option("--jobs", eval_opt.jobs, "parallel trainings");
  eval_cmd->add_option("--format", eval_opt.format, "json | table")
      ->check(CLI::IsMember({"json", "table"}));
  eval_cmd->add_option("--out", eval_opt.out, "write report here instead of stdout only");
  eval_cfg.attach(eval_cmd);

  // detect
  auto* detect = app.add_subcommand("detect", "score windows against a trained verifier");
  reid::DetectOptions detect_opt;
  detect->add_option("--model", detect_opt.model_path, "model checkpoint")->required();
  detect->add_option("--examples", detect_opt.examples_dir, "examples directory")->required();
  detect->add_option("--out", detect_opt.out, "write the decision stream here");

  // embed
  auto* embed = app.add_subcommand("embed", "export fused embeddings as CSV");
  reid::EmbedOptions embed_opt;
  embed->add_option("--model", embed_opt.model_path, "model checkpoint")->required();
  embed->add_option("--examples", embed_opt.examples_dir, "examples directory")->required();
  embed->add_option("--out", embed_opt.out, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      reid::cmd_gen(gen_opt);
    } else if (*ingest) {
      ingest_opt.cfg = ingest_cfg.resolve();
      reid::cmd_ingest(ingest_opt);
    } else if (*train_cmd) {
      train_opt.cfg = train_cfg.resolve();
      reid::cmd_train(train_opt);
    } else if (*eval_cmd) {
      eval_opt.cfg = eval_cfg.resolve();
      const std::string text = reid::cmd_eval(eval_opt);
      std::fputs(text.c_str(), stdout);
    } else if (*detect) {
      const std::string text = reid::cmd_detect(detect_opt);
      std::fputs(text.c_str(), stdout);
    } else if (*embed) {
      const std::string text = reid::cmd_embed(embed_opt);
      std::fputs(text.c_str(), stdout);
    }
  } catch (const reid::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 1;
  }
  return 0;
}

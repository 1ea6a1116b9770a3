#include "reid/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reid {

using nlohmann::json;

const char* fusion_name(Fusion f) { return f == Fusion::Attention ? "attention" : "concat"; }

Fusion fusion_from(const std::string& s) {
  if (s == "attention") return Fusion::Attention;
  if (s == "concat") return Fusion::Concat;
  throw Error(Errc::bad_config, "unknown fusion mode '" + s + "'");
}

void RunConfig::validate() const {
  if (channels.empty()) throw Error(Errc::bad_config, "channels must be non-empty");
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (channels[i] == channels[j]) throw Error(Errc::bad_config, "duplicate channel");
  if (d_con < 1) throw Error(Errc::bad_config, "d_con must be >= 1");
  if (n_layers < 1 || n_layers > 3) throw Error(Errc::bad_config, "n_layers must be 1, 2 or 3");
  if (hidden_dim < 1) throw Error(Errc::bad_config, "hidden_dim must be >= 1");
  if (lr <= 0.0) throw Error(Errc::bad_config, "lr must be > 0");
  if (epochs < 1) throw Error(Errc::bad_config, "epochs must be >= 1");
  if (patience < 1) throw Error(Errc::bad_config, "patience must be >= 1");
  if (hops < 1) throw Error(Errc::bad_config, "hops must be >= 1");
  if (window_len < 1) throw Error(Errc::bad_config, "window_len must be >= 1");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<MetaPath> parse_channel_list(const std::string& value) {
  std::vector<MetaPath> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(meta_path_from(item));
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::stringstream ss(value);
  T v{};
  ss >> v;
  if (ss.fail() || !ss.eof())
    throw Error(Errc::bad_config, "bad value '" + value + "' for key '" + key + "'");
  return v;
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "channels")
    cfg.channels = parse_channel_list(value);
  else if (key == "feature_set")
    cfg.feature_set = feature_set_from(value);
  else if (key == "d_con")
    cfg.d_con = parse_number<int>(key, value);
  else if (key == "n_layers")
    cfg.n_layers = parse_number<int>(key, value);
  else if (key == "hidden_dim")
    cfg.hidden_dim = parse_number<int>(key, value);
  else if (key == "propagation")
    cfg.propagation = propagation_from(value);
  else if (key == "fusion")
    cfg.fusion = fusion_from(value);
  else if (key == "lr")
    cfg.lr = parse_number<double>(key, value);
  else if (key == "beta1")
    cfg.beta1 = parse_number<double>(key, value);
  else if (key == "beta2")
    cfg.beta2 = parse_number<double>(key, value);
  else if (key == "adam_eps")
    cfg.adam_eps = parse_number<double>(key, value);
  else if (key == "epochs")
    cfg.epochs = parse_number<int>(key, value);
  else if (key == "patience")
    cfg.patience = parse_number<int>(key, value);
  else if (key == "seed")
    cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "hops")
    cfg.hops = parse_number<int>(key, value);
  else if (key == "window_len")
    cfg.window_len = parse_number<std::int64_t>(key, value);
  else
    throw Error(Errc::bad_config, "unknown config key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::bad_config, "line " + std::to_string(line_no) + ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  json ch = json::array();
  for (MetaPath p : cfg.channels) ch.push_back(meta_path_name(p));
  j["channels"] = std::move(ch);
  j["feature_set"] = feature_set_name(cfg.feature_set);
  j["d_con"] = cfg.d_con;
  j["n_layers"] = cfg.n_layers;
  j["hidden_dim"] = cfg.hidden_dim;
  j["propagation"] = propagation_name(cfg.propagation);
  j["fusion"] = fusion_name(cfg.fusion);
  j["lr"] = cfg.lr;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["adam_eps"] = cfg.adam_eps;
  j["epochs"] = cfg.epochs;
  j["patience"] = cfg.patience;
  j["seed"] = cfg.seed;
  j["hops"] = cfg.hops;
  j["window_len"] = cfg.window_len;
  return j.dump();
}

RunConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception&) {
    throw Error(Errc::bad_config, "config is not valid JSON");
  }
  RunConfig cfg;
  try {
    cfg.channels.clear();
    for (const auto& c : j.at("channels")) cfg.channels.push_back(meta_path_from(c));
    cfg.feature_set = feature_set_from(j.at("feature_set"));
    cfg.d_con = j.at("d_con");
    cfg.n_layers = j.at("n_layers");
    cfg.hidden_dim = j.at("hidden_dim");
    cfg.propagation = propagation_from(j.at("propagation"));
    cfg.fusion = fusion_from(j.at("fusion"));
    cfg.lr = j.at("lr");
    cfg.beta1 = j.at("beta1");
    cfg.beta2 = j.at("beta2");
    cfg.adam_eps = j.at("adam_eps");
    cfg.epochs = j.at("epochs");
    cfg.patience = j.at("patience");
    cfg.seed = j.at("seed");
    cfg.hops = j.at("hops");
    cfg.window_len = j.at("window_len");
  } catch (const json::exception& e) {
    throw Error(Errc::bad_config, std::string("config schema: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace reid

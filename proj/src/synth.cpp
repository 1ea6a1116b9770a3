#include "reid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace reid {

using nlohmann::json;

void ProgramProfile::validate() const {
  if (exec_name.empty()) throw Error(Errc::bad_profile, "profile needs an exec name");
  if (rate_pp < 0.0 || rate_pf < 0.0 || rate_pi < 0.0)
    throw Error(Errc::bad_profile, "rates must be >= 0");
  if (noise_rate < 0.0 || noise_rate > 1.0)
    throw Error(Errc::bad_profile, "noise_rate must be in [0,1]");
  // An empty preference list with a positive rate is legal: that relation
  // only ever touches random entities (a pure-noise channel).
}

namespace {

std::vector<double> zipf_weights(std::size_t n, double s) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(static_cast<double>(i + 1), -s);
  return w;
}

Entity noise_entity(EntityType kind, Rng& rng) {
  switch (kind) {
    case EntityType::Process:
      return {EntityType::Process, "noise" + std::to_string(rng.bounded(1000)) + ".exe"};
    case EntityType::File:
      return {EntityType::File, "/noise/f" + std::to_string(rng.bounded(1000)) + ".tmp"};
    case EntityType::Socket:
      return {EntityType::Socket, "10.99." + std::to_string(rng.bounded(256)) + "." +
                                      std::to_string(rng.bounded(256)) + ":" +
                                      std::to_string(rng.bounded(65536))};
  }
  return {EntityType::File, "/noise/f0.tmp"};
}

// Events of one window drawn from `profile`, with the source process named
// `claim` (equal to profile.exec_name except for disguised windows).
std::vector<SystemEvent> sample_window(const ProgramProfile& profile, const std::string& claim,
                                       std::pair<std::int64_t, std::int64_t> window, Rng& rng) {
  std::vector<SystemEvent> events;
  const Entity src{EntityType::Process, claim};
  struct Channel {
    double rate;
    EntityType kind;
    Rel rel;
    const std::vector<std::string>* prefs;
  };
  const Channel channels[] = {
      {profile.rate_pp, EntityType::Process, Rel::PP, &profile.preferred_peers},
      {profile.rate_pf, EntityType::File, Rel::PF, &profile.preferred_files},
      {profile.rate_pi, EntityType::Socket, Rel::PI, &profile.preferred_sockets},
  };
  for (const Channel& ch : channels) {
    const int n = rng.poisson(ch.rate);
    const std::vector<double> weights = zipf_weights(ch.prefs->size(), profile.zipf_s);
    for (int i = 0; i < n; ++i) {
      SystemEvent e;
      e.src = src;
      e.rel = ch.rel;
      if (!ch.prefs->empty() && rng.uniform() >= profile.noise_rate)
        e.dst = {ch.kind, (*ch.prefs)[rng.weighted(weights)]};
      else
        e.dst = noise_entity(ch.kind, rng);
      e.ts = window.first + static_cast<std::int64_t>(
                                rng.bounded(static_cast<std::uint64_t>(window.second - window.first)));
      e.host = "h" + std::to_string(rng.bounded(8));
      validate_event(e);
      events.push_back(std::move(e));
    }
  }
  return events;
}

}  // namespace

std::string LabeledWindow::id() const {
  std::string name = claimed_id;
  std::replace(name.begin(), name.end(), '/', '_');
  return name + "__" + tag + "__" + std::to_string(window.first);
}

std::vector<LabeledWindow> gen_corpus(const std::vector<ProgramProfile>& profiles, int n_windows,
                                      std::uint64_t seed, std::int64_t window_len) {
  if (profiles.size() < 2) throw Error(Errc::bad_profile, "corpus wants at least two profiles");
  if (n_windows < 1) throw Error(Errc::bad_profile, "n_windows must be >= 1");
  for (const auto& p : profiles) p.validate();

  std::vector<LabeledWindow> corpus;
  for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
    for (int w = 0; w < n_windows; ++w) {
      LabeledWindow lw;
      lw.claimed_id = profiles[pi].exec_name;
      lw.window = {static_cast<std::int64_t>(w) * window_len,
                   static_cast<std::int64_t>(w + 1) * window_len};
      lw.label = +1;
      lw.tag = "genuine";
      Rng rng = Rng::stream(seed, "corpus", pi, static_cast<std::uint64_t>(w));
      lw.events = sample_window(profiles[pi], profiles[pi].exec_name, lw.window, rng);
      corpus.push_back(std::move(lw));
    }
  }
  return corpus;
}

const char* attack_kind_name(AttackKind k) {
  return k == AttackKind::Disguise ? "Disguise" : "Hijack";
}

AttackKind attack_kind_from(const std::string& s) {
  if (s == "Disguise") return AttackKind::Disguise;
  if (s == "Hijack") return AttackKind::Hijack;
  throw Error(Errc::bad_profile, "unknown attack kind '" + s + "'");
}

std::vector<LabeledWindow> inject_disguise(const std::vector<ProgramProfile>& profiles,
                                           const std::vector<LabeledWindow>& corpus,
                                           const AttackScenario& scenario, std::uint64_t seed,
                                           std::int64_t window_len) {
  if (scenario.count < 1) throw Error(Errc::bad_profile, "scenario count must be >= 1");
  scenario.behavior.validate();
  const bool victim_known =
      std::any_of(profiles.begin(), profiles.end(),
                  [&](const ProgramProfile& p) { return p.exec_name == scenario.victim; });
  if (!victim_known)
    throw Error(Errc::unknown_victim, "victim '" + scenario.victim + "' has no profile");

  std::vector<const LabeledWindow*> victim_windows;
  for (const auto& w : corpus)
    if (w.claimed_id == scenario.victim && w.label == +1) victim_windows.push_back(&w);
  if (scenario.kind == AttackKind::Hijack && victim_windows.empty())
    throw Error(Errc::unknown_victim, "no genuine windows of '" + scenario.victim + "' to hijack");

  std::vector<LabeledWindow> attacks;
  for (int i = 0; i < scenario.count; ++i) {
    LabeledWindow lw;
    lw.claimed_id = scenario.victim;
    lw.label = -1;
    lw.tag = scenario.name;
    Rng rng = Rng::stream(seed, "attack." + scenario.name, static_cast<std::uint64_t>(i));
    if (scenario.kind == AttackKind::Disguise) {
      lw.window = {static_cast<std::int64_t>(i) * window_len,
                   static_cast<std::int64_t>(i + 1) * window_len};
      lw.events = sample_window(scenario.behavior, scenario.victim, lw.window, rng);
    } else {
      const LabeledWindow& base = *victim_windows[i % victim_windows.size()];
      lw.window = base.window;
      lw.events = base.events;
      std::vector<SystemEvent> extra =
          sample_window(scenario.behavior, scenario.victim, lw.window, rng);
      lw.events.insert(lw.events.end(), extra.begin(), extra.end());
    }
    attacks.push_back(std::move(lw));
  }
  return attacks;
}

// ---- JSON formats ----

namespace {

json profile_to_json_obj(const ProgramProfile& p) {
  json j;
  j["exec"] = p.exec_name;
  j["rates"] = {{"pp", p.rate_pp}, {"pf", p.rate_pf}, {"pi", p.rate_pi}};
  j["peers"] = p.preferred_peers;
  j["files"] = p.preferred_files;
  j["sockets"] = p.preferred_sockets;
  j["zipf_s"] = p.zipf_s;
  j["noise_rate"] = p.noise_rate;
  return j;
}

ProgramProfile profile_from_json_obj(const json& j) {
  ProgramProfile p;
  try {
    p.exec_name = j.at("exec").get<std::string>();
    p.rate_pp = j.at("rates").at("pp").get<double>();
    p.rate_pf = j.at("rates").at("pf").get<double>();
    p.rate_pi = j.at("rates").at("pi").get<double>();
    p.preferred_peers = j.at("peers").get<std::vector<std::string>>();
    p.preferred_files = j.at("files").get<std::vector<std::string>>();
    p.preferred_sockets = j.at("sockets").get<std::vector<std::string>>();
    p.zipf_s = j.value("zipf_s", 1.0);
    p.noise_rate = j.value("noise_rate", 0.0);
  } catch (const json::exception& e) {
    throw Error(Errc::bad_profile, std::string("profile schema: ") + e.what());
  }
  p.validate();
  return p;
}

json scenario_to_json_obj(const AttackScenario& s) {
  json j;
  j["kind"] = attack_kind_name(s.kind);
  j["name"] = s.name;
  j["victim"] = s.victim;
  j["behavior"] = profile_to_json_obj(s.behavior);
  j["count"] = s.count;
  return j;
}

AttackScenario scenario_from_json_obj(const json& j) {
  AttackScenario s;
  try {
    s.kind = attack_kind_from(j.at("kind").get<std::string>());
    s.name = j.at("name").get<std::string>();
    s.victim = j.at("victim").get<std::string>();
    s.behavior = profile_from_json_obj(j.at("behavior"));
    s.count = j.at("count").get<int>();
  } catch (const json::exception& e) {
    throw Error(Errc::bad_profile, std::string("scenario schema: ") + e.what());
  }
  if (s.count < 1) throw Error(Errc::bad_profile, "scenario count must be >= 1");
  if (s.name.empty()) throw Error(Errc::bad_profile, "scenario needs a name");
  return s;
}

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, std::string("cannot open ") + what + " '" + path + "'");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception&) {
    throw Error(Errc::bad_profile, std::string(what) + " file is not valid JSON");
  }
}

}  // namespace

std::string ProgramProfile::to_json() const { return profile_to_json_obj(*this).dump(2); }

ProgramProfile ProgramProfile::from_json_text(const std::string& text) {
  try {
    return profile_from_json_obj(json::parse(text));
  } catch (const json::exception&) {
    throw Error(Errc::bad_profile, "profile is not valid JSON");
  }
}

std::vector<ProgramProfile> load_profiles(const std::string& path) {
  const json j = load_json_file(path, "profiles");
  if (!j.is_array()) throw Error(Errc::bad_profile, "profiles file must be a JSON array");
  std::vector<ProgramProfile> out;
  for (const auto& item : j) out.push_back(profile_from_json_obj(item));
  return out;
}

void save_profiles(const std::vector<ProgramProfile>& profiles, const std::string& path) {
  json j = json::array();
  for (const auto& p : profiles) j.push_back(profile_to_json_obj(p));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

std::string AttackScenario::to_json() const { return scenario_to_json_obj(*this).dump(2); }

AttackScenario AttackScenario::from_json_text(const std::string& text) {
  try {
    return scenario_from_json_obj(json::parse(text));
  } catch (const json::exception&) {
    throw Error(Errc::bad_profile, "scenario is not valid JSON");
  }
}

std::vector<AttackScenario> load_scenarios(const std::string& path) {
  const json j = load_json_file(path, "scenarios");
  if (!j.is_array()) throw Error(Errc::bad_profile, "scenarios file must be a JSON array");
  std::vector<AttackScenario> out;
  for (const auto& item : j) out.push_back(scenario_from_json_obj(item));
  return out;
}

void save_scenarios(const std::vector<AttackScenario>& scenarios, const std::string& path) {
  json j = json::array();
  for (const auto& s : scenarios) j.push_back(scenario_to_json_obj(s));
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace reid

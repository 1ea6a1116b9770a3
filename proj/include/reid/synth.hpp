#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reid/events.hpp"
#include "reid/rng.hpp"

namespace reid {

// Generative profile of one program: expected events per window for each
// relation, rank-weighted (Zipf) preference lists per destination type,
// and a probability of touching a random entity instead.
struct ProgramProfile {
  std::string exec_name;
  double rate_pp = 0.0;
  double rate_pf = 0.0;
  double rate_pi = 0.0;
  std::vector<std::string> preferred_peers;
  std::vector<std::string> preferred_files;
  std::vector<std::string> preferred_sockets;
  double zipf_s = 1.0;      // weight of rank r is (r+1)^-zipf_s
  double noise_rate = 0.0;  // chance an event hits a random entity

  void validate() const;  // throws bad_profile

  std::string to_json() const;
  static ProgramProfile from_json_text(const std::string& text);
};

std::vector<ProgramProfile> load_profiles(const std::string& path);
void save_profiles(const std::vector<ProgramProfile>& profiles, const std::string& path);

// One labeled example window: the events, the window bounds, the claimed
// program id, and the ground truth (+1 genuine / -1 attack).
struct LabeledWindow {
  std::string claimed_id;
  std::pair<std::int64_t, std::int64_t> window;
  std::vector<SystemEvent> events;
  int label = +1;
  std::string tag;  // "genuine" or the scenario name

  std::string id() const;  // stable file-friendly identifier
};

// Per profile per window: Poisson(rate) events per relation, destinations
// Zipf-sampled from the preference lists (or noise), timestamps uniform in
// the window. Deterministic per seed via per-(program, window) streams.
std::vector<LabeledWindow> gen_corpus(const std::vector<ProgramProfile>& profiles, int n_windows,
                                      std::uint64_t seed, std::int64_t window_len = 86400);

enum class AttackKind { Disguise, Hijack };

const char* attack_kind_name(AttackKind k);
AttackKind attack_kind_from(const std::string& s);

struct AttackScenario {
  AttackKind kind = AttackKind::Disguise;
  std::string name;
  std::string victim;       // exec name whose identity is claimed
  ProgramProfile behavior;  // attacker profile / hijack extra behavior
  int count = 1;

  std::string to_json() const;
  static AttackScenario from_json_text(const std::string& text);
};

std::vector<AttackScenario> load_scenarios(const std::string& path);
void save_scenarios(const std::vector<AttackScenario>& scenarios, const std::string& path);

// Attack windows claiming the victim's id, labeled -1.
// Disguise: events drawn from the attacker profile under the victim's name.
// Hijack: a genuine victim window plus superimposed extra behavior.
// Errors: unknown_victim (victim absent from profiles/corpus).
std::vector<LabeledWindow> inject_disguise(const std::vector<ProgramProfile>& profiles,
                                           const std::vector<LabeledWindow>& corpus,
                                           const AttackScenario& scenario, std::uint64_t seed,
                                           std::int64_t window_len = 86400);

}  // namespace reid

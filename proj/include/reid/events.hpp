#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reid/error.hpp"

namespace reid {

enum class EntityType { Process, File, Socket };

enum class Rel { PP, PF, PI };

const char* entity_type_name(EntityType k);
const char* rel_name(Rel r);
EntityType entity_type_from(const std::string& s);
Rel rel_from(const std::string& s);

// A system entity, identified by (kind, key). Process keys are executable
// names, File keys absolute paths, Socket keys "ip:port".
struct Entity {
  EntityType kind = EntityType::Process;
  std::string key;

  friend bool operator==(const Entity&, const Entity&) = default;
};

// Kind of destination each relation expects.
EntityType dst_kind_for(Rel r);

// Throws on empty keys or malformed socket keys.
void validate_entity(const Entity& e);

// "<P|F|I>:<key>" — injective over valid entities; keys the node map and
// feature hashing.
std::string canonical_entity_id(const Entity& e);

// One timestamped interaction. src is always a Process; rel must agree with
// dst.kind (PP->Process, PF->File, PI->Socket).
struct SystemEvent {
  Entity src;
  Entity dst;
  Rel rel = Rel::PP;
  std::int64_t ts = 0;
  std::string host;

  friend bool operator==(const SystemEvent&, const SystemEvent&) = default;
};

void validate_event(const SystemEvent& e);

// Parses one JSONL object. Field order irrelevant, unknown fields ignored.
// Errors: malformed_line, type_mismatch, bad_timestamp.
SystemEvent parse_event_line(const std::string& line);

std::string serialize_event(const SystemEvent& e);

// Whole-file read, fail-fast: the first bad line aborts with its 1-based
// number. Blank lines are skipped.
std::vector<SystemEvent> read_event_stream(const std::string& path);

struct LenientReadResult {
  std::vector<SystemEvent> events;
  int skipped = 0;
};

// Like read_event_stream but downgrades bad lines to a skip count
// (the CLI's --skip-bad mode).
LenientReadResult read_event_stream_lenient(const std::string& path);

void write_event_stream(const std::string& path, const std::vector<SystemEvent>& events);

}  // namespace reid

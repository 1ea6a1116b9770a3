#include "reid/events.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace reid {

using nlohmann::json;

const char* entity_type_name(EntityType k) {
  switch (k) {
    case EntityType::Process: return "Process";
    case EntityType::File: return "File";
    case EntityType::Socket: return "Socket";
  }
  return "?";
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::PP: return "PP";
    case Rel::PF: return "PF";
    case Rel::PI: return "PI";
  }
  return "?";
}

EntityType entity_type_from(const std::string& s) {
  if (s == "Process") return EntityType::Process;
  if (s == "File") return EntityType::File;
  if (s == "Socket") return EntityType::Socket;
  throw Error(Errc::malformed_line, "unknown entity kind '" + s + "'");
}

Rel rel_from(const std::string& s) {
  if (s == "PP") return Rel::PP;
  if (s == "PF") return Rel::PF;
  if (s == "PI") return Rel::PI;
  throw Error(Errc::malformed_line, "unknown relation '" + s + "'");
}

EntityType dst_kind_for(Rel r) {
  switch (r) {
    case Rel::PP: return EntityType::Process;
    case Rel::PF: return EntityType::File;
    case Rel::PI: return EntityType::Socket;
  }
  return EntityType::Process;
}

namespace {

bool valid_socket_key(const std::string& key) {
  const auto pos = key.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 >= key.size()) return false;
  long port = 0;
  for (std::size_t i = pos + 1; i < key.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(key[i]))) return false;
    port = port * 10 + (key[i] - '0');
    if (port > 65535) return false;
  }
  return true;
}

}  // namespace

void validate_entity(const Entity& e) {
  if (e.key.empty()) throw Error(Errc::malformed_line, "empty entity key");
  if (e.kind == EntityType::Socket && !valid_socket_key(e.key))
    throw Error(Errc::malformed_line, "socket key '" + e.key + "' is not <ip>:<port>");
}

std::string canonical_entity_id(const Entity& e) {
  switch (e.kind) {
    case EntityType::Process: return "P:" + e.key;
    case EntityType::File: return "F:" + e.key;
    case EntityType::Socket: return "I:" + e.key;
  }
  return e.key;
}

void validate_event(const SystemEvent& e) {
  validate_entity(e.src);
  validate_entity(e.dst);
  if (e.src.kind != EntityType::Process)
    throw Error(Errc::type_mismatch, "event source must be a Process");
  if (e.dst.kind != dst_kind_for(e.rel))
    throw Error(Errc::type_mismatch, std::string("relation ") + rel_name(e.rel) +
                                         " is inconsistent with destination kind " +
                                         entity_type_name(e.dst.kind));
  if (e.ts < 0) throw Error(Errc::bad_timestamp, "negative timestamp");
}

namespace {

Entity entity_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("key") || !j["kind"].is_string() ||
      !j["key"].is_string())
    throw Error(Errc::malformed_line, "entity wants {kind, key} strings");
  Entity e{entity_type_from(j["kind"].get<std::string>()), j["key"].get<std::string>()};
  validate_entity(e);
  return e;
}

}  // namespace

SystemEvent parse_event_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception&) {
    throw Error(Errc::malformed_line, "not a JSON object");
  }
  if (!j.is_object()) throw Error(Errc::malformed_line, "not a JSON object");
  for (const char* field : {"src", "dst", "rel", "ts", "host"}) {
    if (!j.contains(field))
      throw Error(Errc::malformed_line, std::string("missing field '") + field + "'");
  }
  if (!j["rel"].is_string() || !j["host"].is_string())
    throw Error(Errc::malformed_line, "rel/host must be strings");
  if (!j["ts"].is_number_integer())
    throw Error(Errc::bad_timestamp, "ts must be an integer");

  SystemEvent e;
  e.src = entity_from_json(j["src"]);
  e.dst = entity_from_json(j["dst"]);
  e.rel = rel_from(j["rel"].get<std::string>());
  e.ts = j["ts"].get<std::int64_t>();
  e.host = j["host"].get<std::string>();
  validate_event(e);
  return e;
}

std::string serialize_event(const SystemEvent& e) {
  json j;
  j["src"] = {{"kind", entity_type_name(e.src.kind)}, {"key", e.src.key}};
  j["dst"] = {{"kind", entity_type_name(e.dst.kind)}, {"key", e.dst.key}};
  j["rel"] = rel_name(e.rel);
  j["ts"] = e.ts;
  j["host"] = e.host;
  return j.dump();
}

namespace {

template <typename OnBad>
std::vector<SystemEvent> read_stream_impl(const std::string& path, OnBad on_bad) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "'");
  std::vector<SystemEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      events.push_back(parse_event_line(line));
    } catch (const Error& err) {
      on_bad(line_no, err);
    }
  }
  if (in.bad()) throw Error(Errc::io, "read failure on '" + path + "'");
  return events;
}

}  // namespace

std::vector<SystemEvent> read_event_stream(const std::string& path) {
  return read_stream_impl(path, [](int line_no, const Error& err) -> void {
    throw Error(Errc::malformed_line,
                "line " + std::to_string(line_no) + ": " + err.what());
  });
}

LenientReadResult read_event_stream_lenient(const std::string& path) {
  LenientReadResult result;
  result.events = read_stream_impl(path, [&result](int, const Error&) { ++result.skipped; });
  return result;
}

void write_event_stream(const std::string& path, const std::vector<SystemEvent>& events) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write '" + path + "'");
  for (const auto& e : events) out << serialize_event(e) << '\n';
  if (!out) throw Error(Errc::io, "write failure on '" + path + "'");
}

}  // namespace reid

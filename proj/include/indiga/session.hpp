#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace indiga {

using Json = nlohmann::ordered_json;

struct SessionConfig {
  int depth = 6;
  int power = 12;
  unsigned long deg = 4;
  size_t groebner_cap = 100000;
  unsigned long seed = 0;
  bool fail_fast = false;
};

// One statement per line; comments (#) and blank lines are dropped.
struct SessionStatement {
  int line;
  std::string text;
};

struct SessionScript {
  std::string name;
  std::vector<SessionStatement> statements;
};

// Full grammar validation; diagnostics carry the line and column.
SessionScript parse_session(const std::string& name, const std::string& text);
std::string render_session(const SessionScript& script);

struct Report {
  Json body;
  int failed = 0;
  std::vector<long> timings_ms;  // per record; surfaced only by the text format
};

Report execute(const SessionScript& script, const SessionConfig& config);

std::string emit_json(const Report& r);
std::string emit_text(const Report& r);

}  // namespace indiga

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace continuette {

enum class TraceKind {
  kEnqueue,
  kDeliver,
  kCallEnter,
  kCallExit,
  kDischarge,
  kPoison,
  kThrow,
  kPrint,
  kDispatchFailure,
};

std::string_view trace_kind_name(TraceKind kind);

struct TraceEvent {
  std::uint64_t seq = 0;
  TraceKind kind = TraceKind::kPrint;
  std::string vm;
  std::string method;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// `{"seq","kind","vm","method","details"}` in that order, no trailing newline.
std::string to_json_line(const TraceEvent& event);

/// One line per event, each terminated by '\n'.
std::string to_jsonl(const std::vector<TraceEvent>& trace);

}  // namespace continuette

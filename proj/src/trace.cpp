#include "continuette/trace.hpp"

namespace continuette {

std::string_view trace_kind_name(TraceKind kind) {
  switch (kind) {
    case TraceKind::kEnqueue: return "Enqueue";
    case TraceKind::kDeliver: return "Deliver";
    case TraceKind::kCallEnter: return "CallEnter";
    case TraceKind::kCallExit: return "CallExit";
    case TraceKind::kDischarge: return "Discharge";
    case TraceKind::kPoison: return "Poison";
    case TraceKind::kThrow: return "Throw";
    case TraceKind::kPrint: return "Print";
    case TraceKind::kDispatchFailure: return "DispatchFailure";
  }
  return "?";
}

std::string to_json_line(const TraceEvent& event) {
  nlohmann::ordered_json j;
  j["seq"] = event.seq;
  j["kind"] = std::string(trace_kind_name(event.kind));
  j["vm"] = event.vm;
  j["method"] = event.method;
  j["details"] = event.details;
  return j.dump();
}

std::string to_jsonl(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    out += to_json_line(e);
    out += '\n';
  }
  return out;
}

}  // namespace continuette

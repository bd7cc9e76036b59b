#include "continuette/value.hpp"

namespace continuette {

std::string_view cause_name(ErrorCause cause) {
  switch (cause) {
    case ErrorCause::kCalleeThrew: return "CalleeThrew";
    case ErrorCause::kDispatchFailed: return "DispatchFailed";
    case ErrorCause::kResourceUnavailable: return "ResourceUnavailable";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) {
  if (a.storage_.index() != b.storage_.index()) return false;
  if (a.is_ref()) return a.as_ref().id == b.as_ref().id;
  if (a.is_error()) return &a.as_error() == &b.as_error();
  return a.storage_ == b.storage_;
}

Value default_value(Type type) {
  switch (type.kind) {
    case Type::Kind::kInt: return Value::integer(0);
    case Type::Kind::kBool: return Value::boolean(false);
    default: return Value::null();
  }
}

std::string display(const Value& value, const SourceProgram& program) {
  if (value.is_null()) return "null";
  if (value.is_int()) return std::to_string(value.as_int());
  if (value.is_bool()) return value.as_bool() ? "true" : "false";
  if (value.is_string()) return value.as_string();
  if (value.is_ref()) {
    const Ref r = value.as_ref();
    const std::string module =
        r.module >= 0 && r.module < static_cast<int>(program.modules.size()) ? program.modules[r.module].name : "?";
    return module + "#" + std::to_string(r.id);
  }
  const ContinuityError& e = value.as_error();
  return "ContinuityError(" + std::string(cause_name(e.cause)) + ": " + e.message + ")";
}

nlohmann::ordered_json to_json(const Value& value, const SourceProgram& program) {
  if (value.is_null()) return nullptr;
  if (value.is_int()) return value.as_int();
  if (value.is_bool()) return value.as_bool();
  if (value.is_string()) return value.as_string();
  nlohmann::ordered_json j;
  if (value.is_ref()) {
    const Ref r = value.as_ref();
    j["ref"] = r.id;
    j["module"] = r.module >= 0 && r.module < static_cast<int>(program.modules.size()) ? program.modules[r.module].name : "?";
    return j;
  }
  j["error"] = std::string(cause_name(value.as_error().cause));
  j["message"] = value.as_error().message;
  return j;
}

}  // namespace continuette

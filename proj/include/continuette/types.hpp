#pragma once

#include <string>

namespace continuette {

/// Static type assigned by semantic analysis.
struct Type {
  enum class Kind { kUnknown, kInt, kBool, kStr, kObject, kModule, kNull, kError };

  Kind kind = Kind::kUnknown;
  int module = -1;  // index into SourceProgram::modules when kind == kModule

  static Type unknown() { return {}; }
  static Type of(Kind k) { return {k, -1}; }
  static Type module_ref(int index) { return {Kind::kModule, index}; }

  bool is_reference() const {
    return kind == Kind::kStr || kind == Kind::kObject || kind == Kind::kModule || kind == Kind::kError;
  }
  friend bool operator==(const Type&, const Type&) = default;
};

}  // namespace continuette

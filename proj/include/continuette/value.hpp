#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "continuette/ast.hpp"
#include "continuette/types.hpp"
#include "json.hpp"

namespace continuette {

struct Ref {
  int id = -1;
  int module = -1;

  friend bool operator==(const Ref& a, const Ref& b) { return a.id == b.id; }
};

enum class ErrorCause { kCalleeThrew, kDispatchFailed, kResourceUnavailable };

std::string_view cause_name(ErrorCause cause);

struct ContinuityError {
  ErrorCause cause = ErrorCause::kCalleeThrew;
  std::string message;
  std::string origin_method;
  Span origin_span;
};

/// Runtime value. Strings compare by content, references by identity.
class Value {
 public:
  using Storage = std::variant<std::monostate, std::int64_t, bool, std::string, Ref,
                               std::shared_ptr<const ContinuityError>>;

  Value() = default;
  static Value null() { return Value(); }
  static Value integer(std::int64_t v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value string(std::string v) { return Value(Storage(std::move(v))); }
  static Value ref(Ref r) { return Value(Storage(r)); }
  static Value error(ContinuityError e) {
    return Value(Storage(std::make_shared<const ContinuityError>(std::move(e))));
  }

  bool is_null() const { return std::holds_alternative<std::monostate>(storage_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(storage_); }
  bool is_bool() const { return std::holds_alternative<bool>(storage_); }
  bool is_string() const { return std::holds_alternative<std::string>(storage_); }
  bool is_ref() const { return std::holds_alternative<Ref>(storage_); }
  bool is_error() const { return std::holds_alternative<std::shared_ptr<const ContinuityError>>(storage_); }

  std::int64_t as_int() const { return std::get<std::int64_t>(storage_); }
  bool as_bool() const { return std::get<bool>(storage_); }
  const std::string& as_string() const { return std::get<std::string>(storage_); }
  Ref as_ref() const { return std::get<Ref>(storage_); }
  const ContinuityError& as_error() const { return *std::get<std::shared_ptr<const ContinuityError>>(storage_); }

  const Storage& storage() const { return storage_; }

  friend bool operator==(const Value& a, const Value& b);

 private:
  explicit Value(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

/// Int -> 0, Bool -> false, everything else -> null.
Value default_value(Type type);

/// Text produced by `print` and string concatenation.
std::string display(const Value& value, const SourceProgram& program);

nlohmann::ordered_json to_json(const Value& value, const SourceProgram& program);

}  // namespace continuette

#include "continuette/ast.hpp"

namespace continuette {

int ModuleDecl::find_method(std::string_view name) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int ModuleDecl::find_field(std::string_view name) const {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int SourceProgram::find_module(std::string_view name) const {
  for (std::size_t i = 0; i < modules.size(); ++i) {
    if (modules[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::string SourceProgram::qualified_name(MethodRef ref) const {
  if (!ref.valid()) return "?";
  return modules[ref.module].name + "." + modules[ref.module].methods[ref.method].name;
}

}  // namespace continuette

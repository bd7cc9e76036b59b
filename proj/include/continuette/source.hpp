#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace continuette {

/// Half-open byte range [begin, end) into the concatenated source text.
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  static Span cover(Span a, Span b) { return {a.begin < b.begin ? a.begin : b.begin, a.end > b.end ? a.end : b.end}; }
};

struct SourceLocation {
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t col = 1;
};

/// Several input files concatenated in argument order. Offsets are global;
/// locate() maps one back to (file, line, col).
class SourceMap {
 public:
  SourceMap() = default;
  SourceMap(std::string name, std::string text) { add(std::move(name), std::move(text)); }

  void add(std::string name, std::string text);

  const std::string& text() const { return text_; }
  SourceLocation locate(std::uint32_t offset) const;
  std::string_view slice(Span span) const;

 private:
  struct File {
    std::string name;
    std::uint32_t begin;
    std::uint32_t end;
  };
  std::string text_;
  std::vector<File> files_;
};

}  // namespace continuette

#include "continuette/source.hpp"

#include <algorithm>

#include "continuette/diagnostic.hpp"
#include "json.hpp"

namespace continuette {

void SourceMap::add(std::string name, std::string text) {
  const auto begin = static_cast<std::uint32_t>(text_.size());
  text_ += text;
  // Keep tokens of adjacent files apart.
  if (!text_.empty() && text_.back() != '\n') text_ += '\n';
  files_.push_back({std::move(name), begin, static_cast<std::uint32_t>(text_.size())});
}

SourceLocation SourceMap::locate(std::uint32_t offset) const {
  SourceLocation loc;
  if (files_.empty()) return loc;
  auto it = std::find_if(files_.begin(), files_.end(), [&](const File& f) { return offset < f.end; });
  if (it == files_.end()) it = std::prev(files_.end());
  loc.file = it->name;
  const std::uint32_t stop = std::min<std::uint32_t>(offset, static_cast<std::uint32_t>(text_.size()));
  std::uint32_t line_start = it->begin;
  for (std::uint32_t i = it->begin; i < stop; ++i) {
    if (text_[i] == '\n') {
      ++loc.line;
      line_start = i + 1;
    }
  }
  loc.col = stop - line_start + 1;
  return loc;
}

std::string_view SourceMap::slice(Span span) const {
  const auto size = static_cast<std::uint32_t>(text_.size());
  const std::uint32_t b = std::min(span.begin, size);
  const std::uint32_t e = std::min(std::max(span.end, b), size);
  return std::string_view(text_).substr(b, e - b);
}

std::string to_json_line(const Diagnostic& diag, const SourceMap& sources) {
  const SourceLocation loc = sources.locate(diag.span.begin);
  nlohmann::ordered_json j;
  j["code"] = diag.code;
  j["file"] = loc.file;
  j["line"] = loc.line;
  j["col"] = loc.col;
  j["message"] = diag.message;
  return j.dump();
}

}  // namespace continuette

#pragma once

// Exhaustive schedule enumeration. Every scheduling decision with more than
// one deliverable envelope becomes a branch point; the explorer walks the tree
// depth-first by replaying choice prefixes from a fresh run each time.

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "continuette/runtime.hpp"

namespace ct {

struct Exploration {
  std::size_t schedules = 0;
  std::set<std::string> outcomes;
  bool truncated = false;
};

inline Exploration explore_schedules(const continuette::ResolvedProgram& program, continuette::RunConfig base,
                                     const std::function<std::string(const continuette::RunResult&)>& summarize,
                                     std::size_t max_schedules = 200000) {
  Exploration ex;
  std::vector<std::size_t> prefix;
  for (;;) {
    std::vector<std::size_t> taken;
    std::vector<std::size_t> width;
    continuette::RunConfig config = base;
    config.mode = continuette::ScheduleMode::kExternal;
    config.chooser = [&](std::size_t n) {
      const std::size_t i = taken.size();
      const std::size_t pick = i < prefix.size() ? prefix[i] : 0;
      taken.push_back(pick);
      width.push_back(n);
      return pick;
    };
    ex.outcomes.insert(summarize(continuette::run(program, config)));
    ++ex.schedules;
    if (ex.schedules >= max_schedules) {
      ex.truncated = true;
      return ex;
    }
    // Advance to the next unexplored sibling, deepest first.
    std::size_t depth = taken.size();
    while (depth > 0 && taken[depth - 1] + 1 >= width[depth - 1]) --depth;
    if (depth == 0) return ex;
    prefix.assign(taken.begin(), taken.begin() + static_cast<std::ptrdiff_t>(depth));
    ++prefix.back();
  }
}

}  // namespace ct

#pragma once

#include <string_view>
#include <vector>

#include "continuette/ast.hpp"

namespace continuette {

enum class EdgeKind { kFallthrough, kThen, kElse, kLoopEnter, kLoopBack, kLoopExit, kReturn, kThrow };

std::string_view edge_kind_name(EdgeKind kind);

struct CfgEdge {
  int target = -1;
  EdgeKind kind = EdgeKind::kFallthrough;
  Span origin;  // condition or statement that produced the edge
};

struct BasicBlock {
  std::vector<const Stmt*> stmts;  // simple statements only, in execution order
  std::vector<CfgEdge> succs;
  std::vector<int> preds;
  bool loop_header = false;
};

/// Structured control-flow graph of one method body. Pointers refer into the
/// method the graph was built from, which must outlive it. Blocks unreachable
/// from the entry are removed.
struct Cfg {
  std::vector<BasicBlock> blocks;
  int entry = 0;
  int normal_exit = -1;
  int abnormal_exit = -1;
};

struct CfgOptions {
  /// Route loop exits through the end of the body instead of the header, as if
  /// every loop ran at least once. Only used to classify loop-only discharges.
  bool loops_run_at_least_once = false;
};

Cfg build_cfg(const MethodDecl& method, CfgOptions options = {});

}  // namespace continuette

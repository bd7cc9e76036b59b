#include "continuette/cfg.hpp"

#include <deque>

namespace continuette {

std::string_view edge_kind_name(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kFallthrough: return "fallthrough";
    case EdgeKind::kThen: return "then";
    case EdgeKind::kElse: return "else";
    case EdgeKind::kLoopEnter: return "loop-enter";
    case EdgeKind::kLoopBack: return "loop-back";
    case EdgeKind::kLoopExit: return "loop-exit";
    case EdgeKind::kReturn: return "return";
    case EdgeKind::kThrow: return "throw";
  }
  return "?";
}

namespace {

constexpr int kDead = -1;

class Builder {
 public:
  explicit Builder(CfgOptions options) : options_(options) {
    cfg_.entry = fresh();
    cfg_.normal_exit = fresh();
    cfg_.abnormal_exit = fresh();
  }

  Cfg build(const MethodDecl& method) {
    const int end = block(method.body, cfg_.entry);
    if (end != kDead) edge(end, cfg_.normal_exit, EdgeKind::kFallthrough, method.body.span);
    prune();
    return std::move(cfg_);
  }

 private:
  int fresh() {
    cfg_.blocks.emplace_back();
    return static_cast<int>(cfg_.blocks.size()) - 1;
  }

  void edge(int from, int to, EdgeKind kind, Span origin) { cfg_.blocks[from].succs.push_back({to, kind, origin}); }

  // Returns the block control falls out of, or kDead after return/throw.
  int block(const Block& b, int cur) {
    for (const auto& s : b.stmts) cur = stmt(s, cur == kDead ? fresh() : cur);
    return cur;
  }

  int stmt(const Stmt& s, int cur) {
    if (const auto* i = std::get_if<If>(&s.node)) {
      const int then_b = fresh();
      edge(cur, then_b, EdgeKind::kThen, i->cond.span);
      const int then_end = block(i->then_block, then_b);
      int else_end = cur;
      EdgeKind else_kind = EdgeKind::kElse;
      if (i->else_block) {
        const int else_b = fresh();
        edge(cur, else_b, EdgeKind::kElse, i->cond.span);
        else_end = block(*i->else_block, else_b);
        else_kind = EdgeKind::kFallthrough;
      }
      const int join = fresh();
      if (then_end != kDead) edge(then_end, join, EdgeKind::kFallthrough, i->then_block.span);
      if (else_end != kDead) {
        edge(else_end, join, else_kind, i->else_block ? i->else_block->span : i->cond.span);
      }
      return join;
    }
    if (const auto* w = std::get_if<While>(&s.node)) {
      const int header = fresh();
      cfg_.blocks[header].loop_header = true;
      edge(cur, header, EdgeKind::kFallthrough, w->cond.span);
      const int body_b = fresh();
      edge(header, body_b, EdgeKind::kLoopEnter, w->cond.span);
      const int body_end = block(w->body, body_b);
      if (body_end != kDead) edge(body_end, header, EdgeKind::kLoopBack, w->body.span);
      const int exit = fresh();
      if (!options_.loops_run_at_least_once) {
        edge(header, exit, EdgeKind::kLoopExit, w->cond.span);
      } else if (body_end != kDead) {
        edge(body_end, exit, EdgeKind::kLoopExit, w->cond.span);
      }
      return exit;
    }
    if (const auto* b = std::get_if<Block>(&s.node)) return block(*b, cur);

    cfg_.blocks[cur].stmts.push_back(&s);
    if (std::holds_alternative<Return>(s.node)) {
      edge(cur, cfg_.normal_exit, EdgeKind::kReturn, s.span);
      return kDead;
    }
    if (std::holds_alternative<Throw>(s.node)) {
      edge(cur, cfg_.abnormal_exit, EdgeKind::kThrow, s.span);
      return kDead;
    }
    return cur;
  }

  void prune() {
    const int n = static_cast<int>(cfg_.blocks.size());
    std::vector<bool> live(n, false);
    std::deque<int> work{cfg_.entry};
    live[cfg_.entry] = true;
    while (!work.empty()) {
      const int b = work.front();
      work.pop_front();
      for (const auto& e : cfg_.blocks[b].succs) {
        if (!live[e.target]) {
          live[e.target] = true;
          work.push_back(e.target);
        }
      }
    }
    live[cfg_.normal_exit] = true;
    live[cfg_.abnormal_exit] = true;

    std::vector<int> remap(n, -1);
    std::vector<BasicBlock> kept;
    for (int b = 0; b < n; ++b) {
      if (!live[b]) continue;
      remap[b] = static_cast<int>(kept.size());
      kept.push_back(std::move(cfg_.blocks[b]));
    }
    for (auto& blk : kept) {
      for (auto& e : blk.succs) e.target = remap[e.target];
    }
    for (int b = 0; b < static_cast<int>(kept.size()); ++b) {
      for (const auto& e : kept[b].succs) kept[e.target].preds.push_back(b);
    }
    cfg_.blocks = std::move(kept);
    cfg_.entry = remap[cfg_.entry];
    cfg_.normal_exit = remap[cfg_.normal_exit];
    cfg_.abnormal_exit = remap[cfg_.abnormal_exit];
  }

  CfgOptions options_;
  Cfg cfg_;
};

}  // namespace

Cfg build_cfg(const MethodDecl& method, CfgOptions options) { return Builder(options).build(method); }

}  // namespace continuette

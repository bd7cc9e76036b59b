#include "continuette/runtime.hpp"

#include <deque>
#include <random>
#include <set>

namespace continuette {

std::string_view exit_status_name(ExitStatus status) {
  switch (status) {
    case ExitStatus::kClean: return "Clean";
    case ExitStatus::kUncaughtThrow: return "UncaughtThrow";
    case ExitStatus::kUnhandledContinuityError: return "UnhandledContinuityError";
    case ExitStatus::kStepLimitExceeded: return "StepLimitExceeded";
  }
  return "?";
}

int exit_code(ExitStatus status) {
  switch (status) {
    case ExitStatus::kClean: return 0;
    case ExitStatus::kUncaughtThrow: return 3;
    case ExitStatus::kUnhandledContinuityError: return 4;
    case ExitStatus::kStepLimitExceeded: return 5;
  }
  return 1;
}

namespace {

using json = nlohmann::ordered_json;

constexpr int kMaxActivationDepth = 400;

enum class CommitStatus { kPending, kDischarged, kPoisoned };

// One live obligation created when a method with a sends-clause is invoked.
struct Commitment {
  std::uint64_t id = 0;
  MethodRef owner;
  int clause = -1;
  MethodRef target;
  std::vector<std::optional<Value>> passthrough;  // per clause position
  CommitStatus status = CommitStatus::kPending;
};

struct Envelope {
  std::uint64_t seq = 0;
  MethodRef target;
  std::vector<Value> args;
  std::vector<std::uint64_t> inherited;
  std::optional<ContinuityError> poison;
  int sender_vm = -1;
  int call_request = -1;  // index into World::calls_ for a routed synchronous call
};

struct VmState {
  std::string name;
  std::deque<Envelope> queue;
  bool busy = false;  // an activation on this VM is on the interpreter stack
};

struct Instance {
  int module = -1;
  std::vector<Value> fields;
};

// A `throw` unwinding through activations. `forwarded` records whether any
// poison send carried it on to a catch clause.
struct Thrown {
  std::string message;
  Span span;
  std::string method;
  bool forwarded = false;
};

struct StepLimitHit {};

struct RemoteCall {
  bool done = false;
  std::optional<Thrown> thrown;
};

struct Activation {
  MethodRef method;
  int vm = -1;
  std::vector<Value> params;
  std::vector<std::vector<std::pair<std::string, Value>>> scopes;
  std::optional<Value> binder;
  std::vector<std::uint64_t> ledger;
  bool catch_path = false;
};

enum class Flow { kNormal, kReturn };

class BusyGuard {
 public:
  explicit BusyGuard(VmState& vm) : vm_(vm), prev_(vm.busy) { vm_.busy = true; }
  ~BusyGuard() { vm_.busy = prev_; }
  BusyGuard(const BusyGuard&) = delete;
  BusyGuard& operator=(const BusyGuard&) = delete;

 private:
  VmState& vm_;
  bool prev_;
};

class World {
 public:
  World(const ResolvedProgram& program, const RunConfig& config)
      : prog_(program.program), config_(config), rng_(config.seed) {}

  RunResult run() {
    setup();
    const MethodRef main = find_main();
    try {
      dispatch_send(main, {}, vm_of(main), {});
      while (has_work()) step();
    } catch (const StepLimitHit&) {
      step_limited_ = true;
    }
    return finish();
  }

 private:
  // ---- setup ----

  void setup() {
    std::set<std::string> vm_names;
    for (const auto& [module, vm] : config_.vm_assignment) {
      if (prog_.find_module(module) < 0) throw RunError("E_CONFIG", "--assign names unknown module '" + module + "'");
      if (vm.empty()) throw RunError("E_CONFIG", "empty VM name for module '" + module + "'");
    }
    module_vm_name_.resize(prog_.modules.size());
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      auto it = config_.vm_assignment.find(prog_.modules[m].name);
      module_vm_name_[m] = it == config_.vm_assignment.end() ? std::string(kDefaultVm) : it->second;
      vm_names.insert(module_vm_name_[m]);
    }
    for (const auto& name : vm_names) vms_.push_back({name, {}, false});
    for (const auto& name : module_vm_name_) {
      module_vm_.push_back(static_cast<int>(std::distance(vm_names.begin(), vm_names.find(name))));
    }

    for (const auto& rule : config_.faults) {
      if (rule.occurrence < 1) throw RunError("E_CONFIG", "fault occurrence must be >= 1 for '" + rule.method + "'");
      faults_.push_back({resolve_method_name(rule.method), rule.occurrence});
    }
    dispatches_.assign(prog_.modules.size(), {});
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) dispatches_[m].assign(prog_.modules[m].methods.size(), 0);

    implicit_.assign(prog_.modules.size(), -1);
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      if (!prog_.modules[m].fields.empty()) implicit_[m] = new_instance(static_cast<int>(m));
    }
  }

  MethodRef resolve_method_name(const std::string& name) const {
    const auto dot = name.find('.');
    if (dot != std::string::npos) {
      const int m = prog_.find_module(name.substr(0, dot));
      const int idx = m >= 0 ? prog_.modules[m].find_method(name.substr(dot + 1)) : -1;
      if (idx < 0) throw RunError("E_CONFIG", "unknown method '" + name + "'");
      return {m, idx};
    }
    if (auto ref = lookup_method(prog_, -1, name)) return *ref;
    throw RunError("E_CONFIG", "unknown or ambiguous method '" + name + "' (use Module.method)");
  }

  MethodRef find_main() const {
    std::vector<MethodRef> found;
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      const int idx = prog_.modules[m].find_method("main");
      if (idx >= 0) found.push_back({static_cast<int>(m), idx});
    }
    if (found.empty()) throw RunError("E_NO_MAIN", "no module declares 'event main()'");
    if (found.size() > 1) throw RunError("E_AMBIGUOUS_MAIN", "more than one module declares 'main'");
    const MethodDecl& main = prog_.method(found.front());
    if (!main.is_event() || !main.params.empty()) {
      throw RunError("E_NO_MAIN", "'main' must be an event method with no parameters");
    }
    return found.front();
  }

  int new_instance(int module) {
    Instance inst{module, {}};
    for (const auto& f : prog_.modules[module].fields) {
      inst.fields.push_back(f.init ? literal(*f.init) : default_value(f.resolved));
    }
    heap_.push_back(std::move(inst));
    return static_cast<int>(heap_.size()) - 1;
  }

  static Value literal(const Expr& e) {
    if (const auto* i = std::get_if<IntLit>(&e.node)) return Value::integer(i->value);
    if (const auto* b = std::get_if<BoolLit>(&e.node)) return Value::boolean(b->value);
    if (const auto* s = std::get_if<StrLit>(&e.node)) return Value::string(s->value);
    return Value::null();
  }

  RunResult finish() {
    RunResult r;
    r.trace = std::move(trace_);
    r.output = std::move(output_);
    r.violations = std::move(violations_);
    r.steps = steps_;
    if (step_limited_) r.exit = ExitStatus::kStepLimitExceeded;
    else if (unhandled_) r.exit = ExitStatus::kUnhandledContinuityError;
    else if (uncaught_) r.exit = ExitStatus::kUncaughtThrow;
    else r.exit = ExitStatus::kClean;
    for (std::size_t m = 0; m < prog_.modules.size(); ++m) {
      if (implicit_[m] < 0) continue;
      auto& fields = r.final_fields[prog_.modules[m].name];
      const auto& inst = heap_[implicit_[m]];
      for (std::size_t f = 0; f < inst.fields.size(); ++f) {
        fields[prog_.modules[m].fields[f].name] = display(inst.fields[f], prog_);
      }
    }
    return r;
  }

  // ---- trace ----

  int vm_of(MethodRef ref) const { return module_vm_[ref.module]; }

  void emit(TraceKind kind, int vm, std::string method, json details) {
    TraceEvent ev;
    ev.seq = trace_.size();
    ev.kind = kind;
    ev.vm = vm >= 0 ? vms_[vm].name : "";
    ev.method = std::move(method);
    ev.details = std::move(details);
    trace_.push_back(std::move(ev));
  }

  json values_json(const std::vector<Value>& values) const {
    json arr = json::array();
    for (const auto& v : values) arr.push_back(to_json(v, prog_));
    return arr;
  }

  static json ids_json(const std::vector<std::uint64_t>& ids) {
    json arr = json::array();
    for (auto id : ids) arr.push_back(id);
    return arr;
  }

  void tick() {
    if (++steps_ > config_.step_limit) throw StepLimitHit{};
  }

  // ---- scheduling ----

  struct Candidate {
    int vm;
    std::size_t index;
  };

  bool has_work() const {
    for (const auto& vm : vms_) {
      if (!vm.queue.empty()) return true;
    }
    return false;
  }

  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    for (std::size_t v = 0; v < vms_.size(); ++v) {
      const VmState& vm = vms_[v];
      if (vm.busy || vm.queue.empty()) continue;
      if (config_.candidates == CandidatePolicy::kVmFifo) {
        out.push_back({static_cast<int>(v), 0});
        continue;
      }
      std::set<int> senders;
      for (std::size_t i = 0; i < vm.queue.size(); ++i) {
        if (senders.insert(vm.queue[i].sender_vm).second) out.push_back({static_cast<int>(v), i});
      }
    }
    return out;
  }

  std::size_t choose(const std::vector<Candidate>& cands) {
    if (cands.size() == 1) return 0;
    switch (config_.mode) {
      case ScheduleMode::kRoundRobin: {
        for (std::size_t i = 0; i < cands.size(); ++i) {
          if (cands[i].vm > rr_last_) return i;
        }
        return 0;
      }
      case ScheduleMode::kSeeded:
        return static_cast<std::size_t>(rng_() % cands.size());
      case ScheduleMode::kExternal: {
        const std::size_t pick = config_.chooser ? config_.chooser(cands.size()) : 0;
        return pick < cands.size() ? pick : 0;
      }
    }
    return 0;
  }

  void step() {
    tick();
    const auto cands = candidates();
    if (cands.empty()) throw std::logic_error("scheduler has queued work but no deliverable envelope");
    const Candidate c = cands[choose(cands)];
    rr_last_ = c.vm;
    auto& queue = vms_[c.vm].queue;
    Envelope env = std::move(queue[c.index]);
    queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(c.index));
    deliver(std::move(env), c.vm);
  }

  // ---- commitments ----

  std::vector<std::uint64_t> instantiate(MethodRef target, const std::vector<Value>& args) {
    std::vector<std::uint64_t> ids;
    const MethodDecl& m = prog_.method(target);
    for (std::size_t k = 0; k < m.sends.size(); ++k) {
      const CommitmentSpec& clause = m.sends[k];
      Commitment c;
      c.id = commitments_.size();
      c.owner = target;
      c.clause = static_cast<int>(k);
      c.target = clause.target;
      for (std::size_t j = 0; j < clause.params.size(); ++j) {
        const int p = j < clause.passthrough.size() ? clause.passthrough[j] : -1;
        c.passthrough.push_back(p >= 0 ? std::optional<Value>(args[p]) : std::nullopt);
      }
      ids.push_back(c.id);
      commitments_.push_back(std::move(c));
    }
    return ids;
  }

  std::string commitment_label(const Commitment& c) const { return prog_.qualified_name(c.target); }

  void discharge(std::uint64_t id, int vm, std::string_view how, std::string_view mode) {
    Commitment& c = commitments_[id];
    c.status = CommitStatus::kDischarged;
    json d;
    d["commit"] = id;
    d["how"] = how;
    d["by"] = mode;
    emit(TraceKind::kDischarge, vm, commitment_label(c), std::move(d));
  }

  // Satisfies a pending commitment by sending its target a ContinuityError.
  bool poison(std::uint64_t id, int from_vm, const ContinuityError& error) {
    Commitment& c = commitments_[id];
    if (c.status != CommitStatus::kPending) return false;
    c.status = CommitStatus::kPoisoned;
    const MethodDecl& target = prog_.method(c.target);
    json d;
    d["commit"] = id;
    d["cause"] = std::string(cause_name(error.cause));
    d["message"] = error.message;
    emit(TraceKind::kPoison, from_vm, commitment_label(c), std::move(d));

    std::vector<Value> args;
    for (std::size_t j = 0; j < target.params.size(); ++j) {
      args.push_back(j < c.passthrough.size() && c.passthrough[j] ? *c.passthrough[j]
                                                                  : default_value(target.params[j].resolved));
    }
    std::vector<std::uint64_t> inherited = instantiate(c.target, args);
    enqueue(Envelope{0, c.target, std::move(args), std::move(inherited), error, from_vm, -1});
    return true;
  }

  bool poison_pending(const std::vector<std::uint64_t>& ledger, int vm, const ContinuityError& error) {
    bool any = false;
    for (auto id : ledger) any = poison(id, vm, error) || any;
    return any;
  }

  std::vector<std::uint64_t> pending(const std::vector<std::uint64_t>& ledger) const {
    std::vector<std::uint64_t> out;
    for (auto id : ledger) {
      if (commitments_[id].status == CommitStatus::kPending) out.push_back(id);
    }
    return out;
  }

  // ---- dispatch ----

  void enqueue(Envelope env) {
    env.seq = next_envelope_++;
    const int vm = vm_of(env.target);
    json d;
    d["envelope"] = env.seq;
    d["from"] = vms_[env.sender_vm].name;
    d["args"] = values_json(env.args);
    d["commits"] = ids_json(env.inherited);
    if (env.poison) {
      json p;
      p["cause"] = std::string(cause_name(env.poison->cause));
      p["message"] = env.poison->message;
      d["poison"] = std::move(p);
    }
    if (env.call_request >= 0) d["call"] = true;
    emit(TraceKind::kEnqueue, vm, prog_.qualified_name(env.target), std::move(d));
    vms_[vm].queue.push_back(std::move(env));
  }

  bool fault_matches(MethodRef target, int occurrence) const {
    for (const auto& [ref, k] : faults_) {
      if (ref == target && k == occurrence) return true;
    }
    return false;
  }

  void dispatch_send(MethodRef target, std::vector<Value> args, int from_vm, std::vector<std::uint64_t> transfer_ids) {
    (void)transfer_ids;
    const int n = ++dispatches_[target.module][target.method];
    std::vector<std::uint64_t> inherited = instantiate(target, args);
    if (fault_matches(target, n)) {
      dispatch_failed(target, n, "send", from_vm, inherited, {});
      return;
    }
    enqueue(Envelope{0, target, std::move(args), std::move(inherited), std::nullopt, from_vm, -1});
  }

  ContinuityError dispatch_error(MethodRef target, int n) const {
    return {ErrorCause::kDispatchFailed,
            "dispatch " + std::to_string(n) + " of " + prog_.qualified_name(target) + " failed",
            prog_.qualified_name(target), prog_.method(target).name_span};
  }

  // The failed invocation's own obligations are honoured by poison sends.
  bool dispatch_failed(MethodRef target, int n, std::string_view mode, int vm, const std::vector<std::uint64_t>& inherited,
                       const std::vector<std::uint64_t>& direct) {
    json d;
    d["dispatch"] = n;
    d["mode"] = mode;
    d["commits"] = ids_json(inherited);
    emit(TraceKind::kDispatchFailure, vm, prog_.qualified_name(target), std::move(d));
    const ContinuityError err = dispatch_error(target, n);
    bool any = poison_pending(direct, vm, err);
    any = poison_pending(inherited, vm, err) || any;
    return any;
  }

  // Runtime counterpart of the static discharge rule: compares values.
  void match_ledger(const Activation& act, MethodRef target, const std::vector<Value>& args,
                    std::vector<std::uint64_t>& direct, std::vector<std::uint64_t>& transfer) const {
    const MethodDecl& callee = prog_.method(target);
    for (auto id : act.ledger) {
      const Commitment& c = commitments_[id];
      if (c.status != CommitStatus::kPending) continue;
      if (c.target == target) {
        bool ok = true;
        for (std::size_t j = 0; j < c.passthrough.size() && ok; ++j) {
          if (c.passthrough[j]) ok = j < args.size() && args[j] == *c.passthrough[j];
        }
        if (ok) {
          direct.push_back(id);
          continue;
        }
      }
      for (const auto& theirs : callee.sends) {
        if (!(theirs.target == c.target) || theirs.params.size() != c.passthrough.size()) continue;
        bool ok = true;
        for (std::size_t j = 0; j < c.passthrough.size() && ok; ++j) {
          if (!c.passthrough[j]) continue;
          const int q = theirs.passthrough[j];
          ok = q >= 0 && args[q] == *c.passthrough[j];
        }
        if (ok) {
          transfer.push_back(id);
          break;
        }
      }
    }
  }

  void invoke(Activation& act, const Invocation& inv, bool is_send) {
    std::vector<Value> args;
    args.reserve(inv.arity());
    for (std::size_t i = 0; i < inv.arity(); ++i) args.push_back(eval(act, inv.argument(i)));
    const MethodRef target = inv.target;
    const std::string_view mode = is_send ? "send" : "call";

    std::vector<std::uint64_t> direct;
    std::vector<std::uint64_t> transfer;
    match_ledger(act, target, args, direct, transfer);

    const int n = ++dispatches_[target.module][target.method];
    std::vector<std::uint64_t> inherited = instantiate(target, args);
    if (fault_matches(target, n)) {
      for (auto id : transfer) discharge(id, act.vm, "transfer", mode);
      const bool forwarded = dispatch_failed(target, n, mode, act.vm, inherited, direct);
      if (!is_send) {
        throw Thrown{dispatch_error(target, n).message, inv.method_span, prog_.qualified_name(act.method), forwarded};
      }
      return;
    }
    for (auto id : direct) discharge(id, act.vm, "direct", mode);
    for (auto id : transfer) discharge(id, act.vm, "transfer", mode);

    if (is_send) {
      enqueue(Envelope{0, target, std::move(args), std::move(inherited), std::nullopt, act.vm, -1});
      return;
    }

    const std::string name = prog_.qualified_name(target);
    json enter;
    enter["args"] = values_json(args);
    enter["commits"] = ids_json(inherited);
    emit(TraceKind::kCallEnter, act.vm, name, std::move(enter));
    const int target_vm = vm_of(target);

    auto exit_event = [&](std::string_view outcome) {
      json d;
      d["outcome"] = outcome;
      emit(TraceKind::kCallExit, act.vm, name, std::move(d));
    };

    if (target_vm == act.vm) {
      try {
        run_activation(target, std::move(args), std::move(inherited), act.vm);
      } catch (const Thrown&) {
        exit_event("throw");
        throw;
      }
      exit_event("return");
      return;
    }

    if (vms_[target_vm].busy) {
      const ContinuityError err{ErrorCause::kResourceUnavailable,
                                "re-entrant call into suspended vm '" + vms_[target_vm].name + "'", name,
                                inv.method_span};
      const bool forwarded = poison_pending(inherited, act.vm, err);
      exit_event("throw");
      throw Thrown{err.message, inv.method_span, prog_.qualified_name(act.method), forwarded};
    }

    // Route to the owning VM and suspend this activation until it answers.
    const int call_id = static_cast<int>(calls_.size());
    calls_.emplace_back();
    enqueue(Envelope{0, target, std::move(args), std::move(inherited), std::nullopt, act.vm, call_id});
    while (!calls_[call_id].done) step();
    if (calls_[call_id].thrown) {
      exit_event("throw");
      throw *calls_[call_id].thrown;
    }
    exit_event("return");
  }

  // ---- activations ----

  void run_activation(MethodRef ref, std::vector<Value> args, std::vector<std::uint64_t> ledger, int vm) {
    const MethodDecl& m = prog_.method(ref);
    if (++depth_ > kMaxActivationDepth) {
      --depth_;
      const ContinuityError err{ErrorCause::kCalleeThrew, "activation depth limit exceeded", prog_.qualified_name(ref),
                                m.name_span};
      const bool forwarded = poison_pending(ledger, vm, err);
      throw Thrown{err.message, m.name_span, prog_.qualified_name(ref), forwarded};
    }
    struct DepthGuard {
      int& d;
      ~DepthGuard() { --d; }
    } guard{depth_};

    Activation act;
    act.method = ref;
    act.vm = vm;
    act.params = std::move(args);
    act.ledger = std::move(ledger);
    try {
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (m.params[i].is_required && act.params[i].is_null()) {
          throw Thrown{"required parameter '" + m.params[i].name + "' of " + prog_.qualified_name(ref) + " is null",
                       m.params[i].span, prog_.qualified_name(ref), false};
        }
      }
      exec_block(act, m.body);
    } catch (Thrown& t) {
      const ContinuityError err{ErrorCause::kCalleeThrew, t.message, t.method, t.span};
      t.forwarded = poison_pending(act.ledger, vm, err) || t.forwarded;
      throw;
    }
    const auto left = pending(act.ledger);
    if (!left.empty()) {
      // Only reachable when the checker was bypassed.
      for (auto id : left) {
        const Commitment& c = commitments_[id];
        violations_.push_back({prog_.qualified_name(ref), prog_.method(c.owner).sends[c.clause].target_name});
      }
      poison_pending(left, vm,
                     {ErrorCause::kResourceUnavailable, "commitment not discharged on normal return",
                      prog_.qualified_name(ref), m.name_span});
    }
  }

  void run_catch(const Envelope& env, int vm) {
    const MethodDecl& m = prog_.method(env.target);
    Activation act;
    act.method = env.target;
    act.vm = vm;
    act.params = env.args;
    act.ledger = env.inherited;
    act.catch_path = true;
    act.binder = Value::error(*env.poison);
    try {
      exec_block(act, m.catch_clause->body);
    } catch (Thrown& t) {
      const ContinuityError err{ErrorCause::kCalleeThrew, t.message, t.method, t.span};
      t.forwarded = poison_pending(act.ledger, vm, err) || t.forwarded;
      throw;
    }
    // Obligations the handler did not meet are passed on.
    poison_pending(act.ledger, vm, *env.poison);
  }

  void deliver(Envelope env, int vm) {
    BusyGuard busy(vms_[vm]);
    const std::string name = prog_.qualified_name(env.target);
    json d;
    d["envelope"] = env.seq;
    if (env.poison) d["poison"] = true;
    if (env.call_request >= 0) d["call"] = true;
    emit(TraceKind::kDeliver, vm, name, std::move(d));

    if (env.call_request >= 0) {
      RemoteCall& call = calls_[env.call_request];
      try {
        run_activation(env.target, std::move(env.args), std::move(env.inherited), vm);
      } catch (const Thrown& t) {
        calls_[env.call_request].thrown = t;
      }
      calls_[env.call_request].done = true;
      (void)call;
      return;
    }

    auto exit_event = [&](std::string_view outcome) {
      json x;
      x["outcome"] = outcome;
      emit(TraceKind::kCallExit, vm, name, std::move(x));
    };

    try {
      if (env.poison) {
        if (!prog_.method(env.target).catch_clause) {
          unhandled_ = true;
          poison_pending(env.inherited, vm, *env.poison);
          exit_event("unhandled");
          return;
        }
        run_catch(env, vm);
      } else {
        run_activation(env.target, std::move(env.args), std::move(env.inherited), vm);
      }
      exit_event("return");
    } catch (const Thrown& t) {
      exit_event("throw");
      json x;
      x["message"] = t.message;
      x["handled"] = t.forwarded;
      emit(TraceKind::kThrow, vm, name, std::move(x));
      if (!t.forwarded) uncaught_ = true;
    }
  }

  // ---- statements ----

  Flow exec_block(Activation& act, const Block& block) {
    act.scopes.emplace_back();
    Flow flow = Flow::kNormal;
    for (const auto& s : block.stmts) {
      flow = exec(act, s);
      if (flow == Flow::kReturn) break;
    }
    act.scopes.pop_back();
    return flow;
  }

  Value* lookup_local(Activation& act, const std::string& name) {
    for (auto scope = act.scopes.rbegin(); scope != act.scopes.rend(); ++scope) {
      for (auto& [n, v] : *scope) {
        if (n == name) return &v;
      }
    }
    return nullptr;
  }

  [[noreturn]] void raise(const Activation& act, Span span, std::string message) {
    throw Thrown{std::move(message), span, prog_.qualified_name(act.method), false};
  }

  Instance& instance_for(const Activation& act, Span span) {
    const int id = implicit_[act.method.module];
    if (id < 0) raise(act, span, "module has no fields");
    return heap_[id];
  }

  Instance& deref(const Activation& act, const Value& v, Span span) {
    if (!v.is_ref()) raise(act, span, "null dereference");
    return heap_[v.as_ref().id];
  }

  Flow exec(Activation& act, const Stmt& s) {
    tick();
    return std::visit(
        [&](const auto& n) -> Flow {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarDecl>) {
            act.scopes.back().emplace_back(n.name, eval(act, n.init));
          } else if constexpr (std::is_same_v<T, Assign>) {
            Value v = eval(act, n.value);
            if (const auto* name = std::get_if<NameRef>(&n.target.node)) {
              switch (name->kind) {
                case NameKind::kLocal: *lookup_local(act, name->name) = std::move(v); break;
                case NameKind::kParam: act.params[name->slot] = std::move(v); break;
                case NameKind::kField: instance_for(act, n.target.span).fields[name->slot] = std::move(v); break;
                default: raise(act, n.target.span, "cannot assign '" + name->name + "'");
              }
            } else {
              const auto& get = std::get<FieldGet>(n.target.node);
              Value obj = eval(act, *get.object);
              deref(act, obj, n.target.span).fields[get.field_index] = std::move(v);
            }
          } else if constexpr (std::is_same_v<T, If>) {
            if (eval(act, n.cond).as_bool()) return exec_block(act, n.then_block);
            if (n.else_block) return exec_block(act, *n.else_block);
          } else if constexpr (std::is_same_v<T, While>) {
            while (eval(act, n.cond).as_bool()) {
              if (exec_block(act, n.body) == Flow::kReturn) return Flow::kReturn;
              tick();
            }
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            invoke(act, n.call, false);
          } else if constexpr (std::is_same_v<T, SendStmt>) {
            invoke(act, n.call, true);
          } else if constexpr (std::is_same_v<T, Return>) {
            return Flow::kReturn;
          } else if constexpr (std::is_same_v<T, Throw>) {
            raise(act, s.span, display(eval(act, n.message), prog_));
          } else if constexpr (std::is_same_v<T, Print>) {
            std::string text = display(eval(act, n.value), prog_);
            json d;
            d["text"] = text;
            emit(TraceKind::kPrint, act.vm, prog_.qualified_name(act.method), std::move(d));
            if (config_.out) *config_.out << text << '\n';
            output_.push_back(std::move(text));
          } else if constexpr (std::is_same_v<T, Block>) {
            return exec_block(act, n);
          }
          return Flow::kNormal;
        },
        s.node);
  }

  // ---- expressions ----

  static std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

  Value eval(Activation& act, const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Value {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLit>) {
            return Value::integer(n.value);
          } else if constexpr (std::is_same_v<T, BoolLit>) {
            return Value::boolean(n.value);
          } else if constexpr (std::is_same_v<T, StrLit>) {
            return Value::string(n.value);
          } else if constexpr (std::is_same_v<T, NullLit>) {
            return Value::null();
          } else if constexpr (std::is_same_v<T, NameRef>) {
            switch (n.kind) {
              case NameKind::kLocal: return *lookup_local(act, n.name);
              case NameKind::kParam: return act.params[n.slot];
              case NameKind::kField: return instance_for(act, e.span).fields[n.slot];
              case NameKind::kBinder: return act.binder ? *act.binder : Value::null();
              default: raise(act, e.span, "unresolved name '" + n.name + "'");
            }
          } else if constexpr (std::is_same_v<T, FieldGet>) {
            Value obj = eval(act, *n.object);
            if (obj.is_error()) {
              const auto& err = obj.as_error();
              return Value::string(n.field == "cause" ? std::string(cause_name(err.cause)) : err.message);
            }
            return deref(act, obj, e.span).fields[n.field_index];
          } else if constexpr (std::is_same_v<T, NewInstance>) {
            const int id = new_instance(n.module_index);
            return Value::ref({id, n.module_index});
          } else if constexpr (std::is_same_v<T, Unary>) {
            Value v = eval(act, *n.operand);
            if (n.op == UnaryOp::kNeg) return Value::integer(wrap(0u - static_cast<std::uint64_t>(v.as_int())));
            return Value::boolean(!v.as_bool());
          } else {
            return binary(act, n, e.span);
          }
        },
        e.node);
  }

  Value binary(Activation& act, const Binary& b, Span span) {
    if (b.op == BinaryOp::kAnd) return Value::boolean(eval(act, *b.lhs).as_bool() && eval(act, *b.rhs).as_bool());
    if (b.op == BinaryOp::kOr) return Value::boolean(eval(act, *b.lhs).as_bool() || eval(act, *b.rhs).as_bool());
    const Value l = eval(act, *b.lhs);
    const Value r = eval(act, *b.rhs);
    switch (b.op) {
      case BinaryOp::kEq: return Value::boolean(l == r);
      case BinaryOp::kNe: return Value::boolean(!(l == r));
      case BinaryOp::kAdd:
        if (!l.is_int() || !r.is_int()) return Value::string(display(l, prog_) + display(r, prog_));
        return Value::integer(wrap(static_cast<std::uint64_t>(l.as_int()) + static_cast<std::uint64_t>(r.as_int())));
      default:
        break;
    }
    const std::int64_t x = l.as_int();
    const std::int64_t y = r.as_int();
    switch (b.op) {
      case BinaryOp::kSub: return Value::integer(wrap(static_cast<std::uint64_t>(x) - static_cast<std::uint64_t>(y)));
      case BinaryOp::kMul: return Value::integer(wrap(static_cast<std::uint64_t>(x) * static_cast<std::uint64_t>(y)));
      case BinaryOp::kDiv:
      case BinaryOp::kMod:
        if (y == 0) raise(act, span, "division by zero");
        if (x == INT64_MIN && y == -1) return Value::integer(b.op == BinaryOp::kDiv ? x : 0);
        return Value::integer(b.op == BinaryOp::kDiv ? x / y : x % y);
      case BinaryOp::kLt: return Value::boolean(x < y);
      case BinaryOp::kLe: return Value::boolean(x <= y);
      case BinaryOp::kGt: return Value::boolean(x > y);
      case BinaryOp::kGe: return Value::boolean(x >= y);
      default: break;
    }
    raise(act, span, "bad operator");
  }

  const SourceProgram& prog_;
  const RunConfig& config_;
  std::mt19937_64 rng_;

  std::vector<VmState> vms_;
  std::vector<std::string> module_vm_name_;
  std::vector<int> module_vm_;
  std::vector<std::pair<MethodRef, int>> faults_;
  std::vector<std::vector<int>> dispatches_;
  std::vector<Instance> heap_;
  std::vector<int> implicit_;
  std::vector<Commitment> commitments_;
  std::vector<RemoteCall> calls_;

  std::vector<TraceEvent> trace_;
  std::vector<std::string> output_;
  std::vector<MonitorViolation> violations_;
  std::uint64_t next_envelope_ = 0;
  std::uint64_t steps_ = 0;
  int rr_last_ = -1;
  int depth_ = 0;
  bool step_limited_ = false;
  bool unhandled_ = false;
  bool uncaught_ = false;
};

}  // namespace

RunResult run(const ResolvedProgram& program, const RunConfig& config) { return World(program, config).run(); }

}  // namespace continuette

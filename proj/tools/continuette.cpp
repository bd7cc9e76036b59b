// continuette: check and run programs, and replay the golden corpus.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "continuette/driver.hpp"
#include "continuette/runtime.hpp"

namespace fs = std::filesystem;
using namespace continuette;

namespace {

constexpr int kExitDiagnostics = 1;
constexpr int kExitUsage = 2;

struct RunOptions {
  std::vector<std::string> files;
  std::uint64_t seed = 0;
  std::vector<std::string> assign;
  std::vector<std::string> fail;
  std::string trace_path;
  std::uint64_t steps = 0;
  bool force = false;
  std::string schedule = "seeded";
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_run_flags(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--seed", o.seed, "Scheduler seed (default 0)");
  cmd.add_option("--assign", o.assign, "Place a module on a VM: Module=vm")->allow_extra_args(false);
  cmd.add_option("--fail", o.fail, "Fail the k-th dispatch of a method: method@k")->allow_extra_args(false);
  cmd.add_option("--steps", o.steps, "Step limit (overrides CONTINUETTE_STEP_LIMIT)");
  cmd.add_flag("--force", o.force, "Run even if the checker reports errors");
  cmd.add_option("--schedule", o.schedule, "seeded or rr")->check(CLI::IsMember({"seeded", "rr"}));
}

std::uint64_t step_limit(const RunOptions& o) {
  if (o.steps > 0) return o.steps;
  if (const char* env = std::getenv("CONTINUETTE_STEP_LIMIT")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string_view(env).size() && v > 0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("CONTINUETTE_STEP_LIMIT is not a positive integer: ") + env);
  }
  return kDefaultStepLimit;
}

RunConfig make_config(const RunOptions& o) {
  RunConfig config;
  config.seed = o.seed;
  config.mode = o.schedule == "rr" ? ScheduleMode::kRoundRobin : ScheduleMode::kSeeded;
  config.step_limit = step_limit(o);
  for (const auto& a : o.assign) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) throw UsageError("--assign expects Module=vm, got '" + a + "'");
    const std::string module = a.substr(0, eq);
    const std::string vm = a.substr(eq + 1);
    auto [it, fresh] = config.vm_assignment.emplace(module, vm);
    if (!fresh && it->second != vm) throw UsageError("module '" + module + "' assigned to two VMs");
  }
  for (const auto& f : o.fail) {
    const auto at = f.rfind('@');
    if (at == std::string::npos || at == 0) throw UsageError("--fail expects method@k, got '" + f + "'");
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(f.substr(at + 1), &used);
      if (used != f.size() - at - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("--fail occurrence must be an integer in '" + f + "'");
    }
    if (k < 1) throw UsageError("--fail occurrence must be >= 1 in '" + f + "'");
    config.faults.push_back({f.substr(0, at), k});
  }
  return config;
}

void report(const std::vector<Diagnostic>& diagnostics, const SourceMap& sources) {
  for (const auto& d : diagnostics) std::cerr << to_json_line(d, sources) << '\n';
}

struct Outcome {
  int code = 0;
  std::string trace;
};

// Shared by `run` and `corpus`. Throws IoError, UsageError and RunError.
Outcome execute(const RunOptions& o, std::ostream* out) {
  const RunConfig base = make_config(o);
  const SourceMap sources = load_files(o.files);
  CompileResult compiled = compile(sources);
  report(compiled.diagnostics, sources);
  if (!compiled.program || (!compiled.diagnostics.empty() && !o.force)) return {kExitDiagnostics, {}};
  RunConfig config = base;
  config.out = out;
  const RunResult result = run(*compiled.program, config);
  return {exit_code(result.exit), to_jsonl(result.trace)};
}

int cmd_check(const std::vector<std::string>& files) {
  const SourceMap sources = load_files(files);
  const CompileResult compiled = compile(sources);
  report(compiled.diagnostics, sources);
  return compiled.ok() ? 0 : kExitDiagnostics;
}

int cmd_run(const RunOptions& o) {
  Outcome outcome = execute(o, &std::cout);
  std::cout.flush();
  if (!o.trace_path.empty() && outcome.code != kExitDiagnostics) {
    std::ofstream t(o.trace_path, std::ios::binary);
    if (!t) throw IoError("cannot write trace '" + o.trace_path + "'");
    t << outcome.trace;
  }
  return outcome.code;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write '" + p.string() + "'");
  out << text;
}

// Runs one corpus case at seed 0 with the case's optional `flags` file.
bool corpus_case(const fs::path& dir, bool update) {
  const std::string name = dir.filename().string();
  RunOptions o;
  if (fs::exists(dir / "flags")) {
    CLI::App flags_app("flags");
    add_run_flags(flags_app, o);
    std::string text = read_file(dir / "flags");
    for (auto& c : text) {
      if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    try {
      flags_app.parse(text, false);
    } catch (const CLI::ParseError& e) {
      throw UsageError(name + "/flags: " + e.what());
    }
  }
  o.seed = 0;
  o.files = {(dir / "program.cont").string()};
  const Outcome got = execute(o, nullptr);
  const std::string exit_text = std::to_string(got.code) + "\n";
  if (update) {
    write_file(dir / "expected.trace.jsonl", got.trace);
    write_file(dir / "expected.exit", exit_text);
    std::cout << "UPDATED " << name << '\n';
    return true;
  }
  const std::string want_exit = read_file(dir / "expected.exit");
  const std::string want_trace = read_file(dir / "expected.trace.jsonl");
  if (want_exit != exit_text) {
    std::cout << "FAIL " << name << ": exit " << got.code << ", expected " << want_exit;
    return false;
  }
  if (want_trace != got.trace) {
    std::cout << "FAIL " << name << ": trace differs from expected.trace.jsonl\n";
    return false;
  }
  std::cout << "PASS " << name << '\n';
  return true;
}

int cmd_corpus(const std::string& root, const std::vector<std::string>& only, bool update) {
  std::vector<fs::path> cases;
  if (!fs::is_directory(root)) throw IoError("not a directory: '" + root + "'");
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "program.cont")) continue;
    const std::string name = entry.path().filename().string();
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    cases.push_back(entry.path());
  }
  std::sort(cases.begin(), cases.end());
  if (cases.empty()) throw UsageError("no corpus cases found under '" + root + "'");
  bool all = true;
  for (const auto& c : cases) all = corpus_case(c, update) && all;
  return all ? 0 : kExitDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Checker and runtime for Continuette programs", "continuette");
  app.require_subcommand(1);

  std::vector<std::string> check_files;
  auto* check = app.add_subcommand("check", "Check programs and print diagnostics as JSON lines");
  check->add_option("files", check_files, "Source files, concatenated in order")->required();

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Check, then run a program");
  run_cmd->add_option("files", run_opts.files, "Source files, concatenated in order")->required();
  add_run_flags(*run_cmd, run_opts);
  run_cmd->add_option("--trace", run_opts.trace_path, "Write the JSONL trace here");

  std::string corpus_root;
  std::vector<std::string> corpus_only;
  bool corpus_update = false;
  auto* corpus = app.add_subcommand("corpus", "Replay corpus cases at seed 0 against their goldens");
  corpus->add_option("dir", corpus_root, "Corpus directory")->required();
  corpus->add_option("--only", corpus_only, "Restrict to these case names");
  corpus->add_flag("--update", corpus_update, "Rewrite the goldens instead of comparing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "continuette: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (check->parsed()) return cmd_check(check_files);
    if (run_cmd->parsed()) return cmd_run(run_opts);
    return cmd_corpus(corpus_root, corpus_only, corpus_update);
  } catch (const IoError& e) {
    std::cerr << "continuette: " << e.what() << '\n';
  } catch (const UsageError& e) {
    std::cerr << "continuette: " << e.what() << '\n';
  } catch (const RunError& e) {
    std::cerr << "continuette: " << e.code() << ": " << e.what() << '\n';
  }
  return kExitUsage;
}

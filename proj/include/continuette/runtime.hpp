#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "continuette/sema.hpp"
#include "continuette/trace.hpp"
#include "continuette/value.hpp"

namespace continuette {

enum class ExitStatus { kClean, kUncaughtThrow, kUnhandledContinuityError, kStepLimitExceeded };

std::string_view exit_status_name(ExitStatus status);

/// Fail the `occurrence`-th (1-based) dispatch of `method`. The method is named
/// either `name` (must be unique) or `Module.name`.
struct FaultRule {
  std::string method;
  int occurrence = 1;
};

enum class ScheduleMode {
  kRoundRobin,  // rotate over VMs with work
  kSeeded,      // uniform choice among VMs with work, driven by `seed`
  kExternal,    // `chooser` picks; used by exhaustive exploration
};

enum class CandidatePolicy {
  kVmFifo,    // only the head of each VM queue may be delivered
  kPairFifo,  // the oldest envelope of each (sender VM, receiver VM) pair may be delivered
};

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;
inline constexpr std::string_view kDefaultVm = "main";

struct RunConfig {
  std::uint64_t seed = 0;
  ScheduleMode mode = ScheduleMode::kSeeded;
  CandidatePolicy candidates = CandidatePolicy::kVmFifo;
  /// Module name -> VM name. Unlisted modules run on "main".
  std::map<std::string, std::string> vm_assignment;
  std::vector<FaultRule> faults;
  std::uint64_t step_limit = kDefaultStepLimit;
  /// kExternal only: given n >= 1 candidates, return an index in [0, n).
  std::function<std::size_t(std::size_t)> chooser;
  /// Receives `print` output, one line per statement. May be null.
  std::ostream* out = nullptr;
};

/// A checker-accepted method returned normally with an undischarged
/// commitment. Never expected outside forced runs.
struct MonitorViolation {
  std::string method;
  std::string commitment;
};

struct RunResult {
  std::vector<TraceEvent> trace;
  ExitStatus exit = ExitStatus::kClean;
  std::vector<std::string> output;
  std::vector<MonitorViolation> violations;
  /// Field values of each module's implicit instance at the end of the run,
  /// rendered with display().
  std::map<std::string, std::map<std::string, std::string>> final_fields;
  std::uint64_t steps = 0;
};

/// Setup problems: missing or ambiguous main, unknown names in the config.
class RunError : public std::runtime_error {
 public:
  RunError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

/// Sends `main()` and runs every VM's event loop until all queues drain or the
/// step limit is hit. Deterministic in (program, config).
RunResult run(const ResolvedProgram& program, const RunConfig& config);

/// Process exit code for a run outcome: 0, 3, 4 or 5.
int exit_code(ExitStatus status);

}  // namespace continuette

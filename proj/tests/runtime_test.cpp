#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support/test_util.hpp"

using namespace continuette;
using ct::count;
using ct::index_of;

namespace {

RunConfig on_vms(std::map<std::string, std::string> assign, std::uint64_t seed = 0) {
  RunConfig c;
  c.vm_assignment = std::move(assign);
  c.seed = seed;
  return c;
}

std::string form_join(int n) {
  return ct::replace_once(ct::corpus_program("form_join"), "int composeLines = 5;",
                          "int composeLines = " + std::to_string(n) + ";");
}

const TraceEvent& only(const std::vector<TraceEvent>& trace, TraceKind kind, const std::string& method) {
  const auto found = ct::events(trace, kind, method);
  if (found.size() != 1) throw std::runtime_error("expected exactly one " + method);
  return *found[0];
}

}  // namespace

TEST(Dispatch, SendReturnsBeforeTheTargetRuns) {
  const RunResult r = ct::run_text(ct::corpus_program("commit_chain"));
  const long exit_one = index_of(r.trace, TraceKind::kCallExit, "MyClass.one");
  const long deliver_three = index_of(r.trace, TraceKind::kDeliver, "MyClass.three");
  ASSERT_GE(exit_one, 0);
  ASSERT_GE(deliver_three, 0);
  EXPECT_LT(exit_one, deliver_three);
  EXPECT_EQ(r.output, (std::vector<std::string>{"two any", "three 6", "four 6"}));
}

TEST(Dispatch, SameVmCallIsInline) {
  const RunResult r = ct::run_text(ct::corpus_program("commit_chain"));
  EXPECT_EQ(count(r.trace, TraceKind::kEnqueue, "MyClass.two"), 0u);
  EXPECT_EQ(count(r.trace, TraceKind::kEnqueue, "MyClass.one"), 0u);
  EXPECT_EQ(count(r.trace, TraceKind::kCallEnter, "MyClass.two"), 1u);
}

TEST(Dispatch, CrossVmCallIsDeliveredBeforeTheCallerResumes) {
  const ResolvedProgram p = ct::must_compile(ct::corpus_program("cross_vm_call"));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RunResult r = run(p, on_vms({{"Store", "B"}, {"App", "A"}}, seed));
    const auto delivers = ct::events(r.trace, TraceKind::kDeliver, "Store.add");
    const auto exits = ct::events(r.trace, TraceKind::kCallExit, "Store.add");
    ASSERT_EQ(delivers.size(), 2u);
    ASSERT_EQ(exits.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(delivers[i]->vm, "B");
      EXPECT_EQ(exits[i]->vm, "A");
      EXPECT_LT(delivers[i]->seq, exits[i]->seq);
    }
    EXPECT_EQ(r.final_fields.at("Store").at("total"), "5");
  }
}

TEST(Dispatch, SendsBetweenTheSameVmsKeepOrder) {
  const std::string src = R"(module M {
    event main() { send e(1); send e(2); send e(3); }
    event e(int n) { print n; }
  })";
  EXPECT_EQ(ct::run_text(src).output, (std::vector<std::string>{"1", "2", "3"}));
}

TEST(Dispatch, RequiredNullAtRuntimeThrowsInTheCallee) {
  const std::string src = R"(module MyClass {
    event main() { MyClass m = null; send four(m, 1); }
    event four(required MyClass this, int y) { print "body"; }
  })";
  const RunResult r = ct::run_text(src);
  EXPECT_TRUE(r.output.empty());
  EXPECT_EQ(r.exit, ExitStatus::kUncaughtThrow);
}

TEST(Deliver, OrdinaryEnvelopeRunsTheBody) {
  const std::string src = R"(module M {
    event main() { send four(1); }
    event four(int y) { print "body " + y; } catch (ContinuityError e) { print "catch"; }
  })";
  EXPECT_EQ(ct::run_text(src).output, std::vector<std::string>{"body 1"});
}

TEST(Poison, PoisonDefaultsCatchSeesOriginalThisAndDefaultY) {
  const RunResult r = ct::run_text(ct::corpus_program("poison_defaults"));
  EXPECT_EQ(r.exit, ExitStatus::kClean);
  ASSERT_EQ(count(r.trace, TraceKind::kPoison, "MyClass.four"), 1u);
  const auto& enq = only(r.trace, TraceKind::kEnqueue, "MyClass.four");
  ASSERT_TRUE(enq.details.contains("poison"));
  EXPECT_EQ(enq.details["poison"]["cause"], "CalleeThrew");
  const auto& call_one = only(r.trace, TraceKind::kCallEnter, "MyClass.one");
  EXPECT_EQ(enq.details["args"][0], call_one.details["args"][0]);
  EXPECT_EQ(enq.details["args"][1], 0);
  EXPECT_EQ(r.output, (std::vector<std::string>{"two any", "four caught CalleeThrew: transfer rejected",
                                                "this MyClass#0", "y 0"}));
}

TEST(Poison, AlreadyDischargedMeansNoPoison) {
  const std::string src = R"(module M {
    event main() { send three(5); }
    event three(int a) sends four(int a) { send four(a); throw "late"; }
    event four(int a) { print "four " + a; }
  })";
  const RunResult r = ct::run_text(src);
  EXPECT_EQ(count(r.trace, TraceKind::kPoison), 0u);
  EXPECT_EQ(r.output, std::vector<std::string>{"four 5"});
  EXPECT_EQ(r.exit, ExitStatus::kUncaughtThrow);
}

TEST(Poison, EachUndischargedCommitmentPoisonedOnce) {
  // Every subset of {g, h} discharged before the throw.
  for (int mask = 0; mask < 4; ++mask) {
    std::string body;
    if (mask & 1) body += "send g(a); ";
    if (mask & 2) body += "send h(a); ";
    const std::string src = "module M {\n event main() { send f(3); }\n event f(int a) sends g(int a), h(int a) { " +
                            body + "throw \"x\"; }\n event g(int a) {} catch (ContinuityError e) {}\n" +
                            " event h(int a) {} catch (ContinuityError e) {}\n}";
    const RunResult r = ct::run_text(src);
    EXPECT_EQ(count(r.trace, TraceKind::kPoison, "M.g"), (mask & 1) ? 0u : 1u) << mask;
    EXPECT_EQ(count(r.trace, TraceKind::kPoison, "M.h"), (mask & 2) ? 0u : 1u) << mask;
    EXPECT_EQ(r.exit, mask == 3 ? ExitStatus::kUncaughtThrow : ExitStatus::kClean) << mask;
  }
}

TEST(Poison, ChainsThroughCatchThatDoesNotDischarge) {
  const RunResult r = ct::run_text(ct::corpus_program("poison_chain"));
  EXPECT_EQ(count(r.trace, TraceKind::kPoison, "Chain.relay"), 1u);
  EXPECT_EQ(count(r.trace, TraceKind::kPoison, "Chain.finish"), 1u);
  EXPECT_EQ(r.final_fields.at("Chain").at("handled"), "1");
  EXPECT_EQ(r.output.back(), "finish caught start failed for 7 for 7");
  EXPECT_EQ(r.exit, ExitStatus::kClean);
}

TEST(Poison, CatchlessTargetIsUnhandledButQueuesDrain) {
  const RunResult r = ct::run_text(ct::corpus_program("unhandled_poison"));
  EXPECT_EQ(r.exit, ExitStatus::kUnhandledContinuityError);
  EXPECT_EQ(r.output, std::vector<std::string>{"queues keep draining"});
  const auto& exit = only(r.trace, TraceKind::kCallExit, "Job.done");
  EXPECT_EQ(exit.details["outcome"], "unhandled");
}

TEST(Poison, ArgumentsFollowThePassThroughLaw) {
  const std::string src = R"(module M {
    event main() { send f(4, true, "s"); }
    event f(int a, bool b, string s) sends g(int a, bool q, string s, int z) { throw "x"; }
    event g(int a, bool q, string s, int z) {} catch (ContinuityError e) { print a + " " + q + " " + s + " " + z; }
  })";
  EXPECT_EQ(ct::run_text(src).output, std::vector<std::string>{"4 false s 0"});
}

TEST(Poison, ThrowInSynchronousCalleePoisonsItsLedgerThenPropagates) {
  const std::string src = R"(module M {
    event main() { outer(); }
    void outer() { inner(9); print "not reached"; }
    void inner(int a) sends done(int a) { throw "inner failed"; }
    event done(int a) { } catch (ContinuityError e) { print "done caught " + a; }
  })";
  const RunResult r = ct::run_text(src);
  EXPECT_EQ(r.output, std::vector<std::string>{"done caught 9"});
  EXPECT_EQ(r.exit, ExitStatus::kClean);
  const auto& t = only(r.trace, TraceKind::kThrow, "M.main");
  EXPECT_EQ(t.details["handled"], true);
}

TEST(Faults, CommitChainThreeFailsAndFourCatches) {
  RunConfig c;
  c.faults = {{"three", 1}};
  const RunResult r = ct::run_text(ct::corpus_program("commit_chain_fail_three"), c);
  EXPECT_EQ(r.exit, ExitStatus::kClean);
  EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "MyClass.three"), 0u);
  EXPECT_EQ(count(r.trace, TraceKind::kPoison, "MyClass.four"), 1u);
  EXPECT_EQ(r.output.back(), "four failed: DispatchFailed a=6");
}

TEST(Faults, StrictCommitChainHasNoCatchForFour) {
  RunConfig c;
  c.faults = {{"MyClass.three", 1}};
  EXPECT_EQ(ct::run_text(ct::corpus_program("commit_chain"), c).exit, ExitStatus::kUnhandledContinuityError);
}

TEST(Faults, MethodWithoutCommitmentsIsDroppedSilently) {
  RunConfig c;
  c.faults = {{"report", 1}};
  const RunResult r = ct::run_text(ct::corpus_program("cross_vm_call"), c);
  EXPECT_EQ(count(r.trace, TraceKind::kDispatchFailure, "App.report"), 1u);
  EXPECT_EQ(count(r.trace, TraceKind::kPoison), 0u);
  EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "App.report"), 0u);
  EXPECT_EQ(r.exit, ExitStatus::kClean);
}

TEST(Faults, FailedCallThrowsInTheCaller) {
  RunConfig c;
  c.faults = {{"add", 2}};
  const RunResult r = ct::run_text(ct::corpus_program("cross_vm_call"), c);
  EXPECT_EQ(r.output, std::vector<std::string>{"added 2"});
  EXPECT_EQ(r.exit, ExitStatus::kUncaughtThrow);
}

TEST(Faults, FormJoinStillJoinsWhenOneFormFails) {
  const ResolvedProgram p = ct::must_compile(ct::corpus_program("form_join"));
  for (int k = 1; k <= 5; ++k) {
    RunConfig c = on_vms({{"Parser", "A"}, {"Former", "B"}}, static_cast<std::uint64_t>(k));
    c.faults = {{"executeForm", k}};
    const RunResult r = run(p, c);
    EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "Former.executeForm"), 4u);
    EXPECT_EQ(std::count(r.output.begin(), r.output.end(), "composed 5"), 1) << k;
    EXPECT_EQ(r.exit, ExitStatus::kClean);
  }
}

TEST(Faults, UnknownNamesAreConfigErrors) {
  const ResolvedProgram p = ct::must_compile(ct::corpus_program("commit_chain"));
  RunConfig c;
  c.faults = {{"nope", 1}};
  EXPECT_THROW(run(p, c), RunError);
  RunConfig d;
  d.vm_assignment = {{"Nope", "x"}};
  EXPECT_THROW(run(p, d), RunError);
}

TEST(Run, FormJoinCountsAndGuard) {
  for (int n : {0, 1, 2, 5}) {
    const RunResult r = ct::run_text(form_join(n), on_vms({{"Parser", "A"}, {"Former", "B"}}));
    EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "Former.executeForm"), static_cast<std::size_t>(n));
    EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "Parser.reportFormed"), static_cast<std::size_t>(n));
    ASSERT_EQ(r.output.back(), "composed " + std::to_string(n));
  }
}

TEST(Run, FormJoinWithNoFormsFiresOnTheCountingSend) {
  const RunResult r = ct::run_text(form_join(0));
  EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "Parser.executeComposition"), 1u);
  EXPECT_EQ(r.final_fields.at("Parser").at("requiredCount"), "0");
  EXPECT_EQ(r.final_fields.at("Parser").at("arrived"), "0");
  EXPECT_EQ(r.output, std::vector<std::string>{"composed 0"});
}

TEST(Run, EmptyMain) {
  const RunResult r = ct::run_text(ct::corpus_program("empty_main"));
  EXPECT_EQ(r.exit, ExitStatus::kClean);
  ASSERT_EQ(r.trace.size(), 3u);
  EXPECT_EQ(r.trace[0].kind, TraceKind::kEnqueue);
  EXPECT_EQ(r.trace[1].kind, TraceKind::kDeliver);
  EXPECT_EQ(r.trace[2].kind, TraceKind::kCallExit);
}

TEST(Run, MainConventions) {
  EXPECT_THROW(ct::run_text("module M { void f() {} }"), RunError);
  EXPECT_THROW(ct::run_text("module A { event main() {} } module B { event main() {} }"), RunError);
  EXPECT_THROW(ct::run_text("module M { event main(int a) {} }"), RunError);
  EXPECT_THROW(ct::run_text("module M { void main() {} }"), RunError);
}

TEST(Run, UncaughtThrow) {
  const RunResult r = ct::run_text(ct::corpus_program("uncaught_throw"));
  EXPECT_EQ(r.exit, ExitStatus::kUncaughtThrow);
  EXPECT_EQ(r.output, std::vector<std::string>{"before"});
}

TEST(Run, StepLimit) {
  RunConfig c;
  c.step_limit = 50;
  const RunResult r = ct::run_text("module M { event main() { int i = 0; while (true) { i = i + 1; } } }", c);
  EXPECT_EQ(r.exit, ExitStatus::kStepLimitExceeded);
  EXPECT_LE(r.steps, 51u);
}

TEST(Run, StepLimitOutranksOtherOutcomes) {
  RunConfig c;
  c.step_limit = 200;
  const RunResult r = ct::run_text(R"(module M {
    event main() { send bad(); send spin(); }
    event bad() { throw "x"; }
    event spin() { while (true) { } }
  })",
                                   c);
  EXPECT_EQ(r.exit, ExitStatus::kStepLimitExceeded);
}

TEST(Run, UnhandledOutranksUncaught) {
  const RunResult r = ct::run_text(R"(module M {
    event main() { send f(); send g(); }
    event f() sends h() { throw "x"; }
    event h() {}
    event g() { throw "y"; }
  })");
  EXPECT_EQ(r.exit, ExitStatus::kUnhandledContinuityError);
}

TEST(Run, ReentrantCallIntoSuspendedVmThrows) {
  const RunResult r = ct::run_text(ct::corpus_program("reentrant_call"), on_vms({{"Right", "right"}}));
  EXPECT_EQ(r.exit, ExitStatus::kUncaughtThrow);
  const auto& t = only(r.trace, TraceKind::kThrow, "Left.main");
  EXPECT_NE(t.details["message"].get<std::string>().find("re-entrant"), std::string::npos);
}

TEST(Run, ArithmeticAndFields) {
  const RunResult r = ct::run_text(R"(module Counter {
    int n = -2;
    string tag = "t";
    event main() {
      n = n * 3 + 20 / 3 % 4;
      Box b = new Box();
      b.v = n;
      Box c = b;
      c.v = c.v + 1;
      print tag + ":" + n + ":" + b.v + ":" + (b == c) + ":" + ("ab" == "a" + "b");
    }
  }
  module Box { int v = 0; })");
  EXPECT_EQ(r.output, std::vector<std::string>{"t:-4:-3:true:true"});
}

TEST(Run, DivisionByZeroThrows) {
  EXPECT_EQ(ct::run_text("module M { event main() { int z = 0; print 1 / z; } }").exit, ExitStatus::kUncaughtThrow);
}

TEST(Run, ForcedRunOfRejectedProgramTripsTheMonitor) {
  const ResolvedProgram p = ct::force_compile(ct::corpus_program("commit_chain_missing_two"));
  const RunResult r = run(p, {});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].method, "MyClass.one");
  EXPECT_EQ(r.violations[0].commitment, "two");
  const auto& poison = only(r.trace, TraceKind::kPoison, "MyClass.two");
  EXPECT_EQ(poison.details["cause"], "ResourceUnavailable");
}

TEST(Run, TransferDischargesViaCalleeClause) {
  const RunResult r = ct::run_text(ct::corpus_program("transfer"));
  const auto discharges = ct::events(r.trace, TraceKind::kDischarge, "Shop.receipt");
  ASSERT_EQ(discharges.size(), 2u);
  EXPECT_EQ(discharges[0]->details["how"], "transfer");
  EXPECT_EQ(discharges[1]->details["how"], "direct");
  EXPECT_EQ(count(r.trace, TraceKind::kDeliver, "Shop.receipt"), 1u);
}

TEST(Trace, SeqIsStrictlyIncreasingAndFieldsOrdered) {
  const RunResult r = ct::run_text(ct::corpus_program("poison_defaults"));
  for (std::size_t i = 0; i < r.trace.size(); ++i) EXPECT_EQ(r.trace[i].seq, i);
  const std::string line = to_json_line(r.trace[0]);
  EXPECT_EQ(line.rfind("{\"seq\":0,\"kind\":\"Enqueue\",\"vm\":\"main\",\"method\":\"App.main\",\"details\":", 0), 0u)
      << line;
}

#include <gtest/gtest.h>

#include <filesystem>

#include "continuette/commit.hpp"
#include "support/commit_oracle.hpp"
#include "support/methods.hpp"
#include "support/test_util.hpp"

using namespace continuette;
using ct::codes_of;

namespace {

const Invocation& first_invocation(const MethodDecl& m, const std::string& name) {
  std::function<const Invocation*(const Block&)> find = [&](const Block& b) -> const Invocation* {
    for (const auto& s : b.stmts) {
      if (const Invocation* inv = ct::invocation_in(s); inv && inv->method == name) return inv;
      if (const auto* i = std::get_if<If>(&s.node)) {
        if (auto* r = find(i->then_block)) return r;
        if (i->else_block) {
          if (auto* r = find(*i->else_block)) return r;
        }
      }
      if (const auto* w = std::get_if<While>(&s.node)) {
        if (auto* r = find(w->body)) return r;
      }
    }
    return nullptr;
  };
  const Invocation* inv = find(m.body);
  if (!inv) throw std::runtime_error("no invocation of " + name);
  return *inv;
}

std::string with_body(const std::string& body) {
  return "module M {\n  void f(final int a, bool c, int n) sends g(int a) {\n" + body +
         "\n  }\n  event g(int a) {}\n  void relay(int a) sends g(int a) { send g(a); }\n}\n";
}

std::vector<CommitError> errors_of(const std::string& src) {
  const ResolvedProgram p = ct::force_compile(src);
  return check_commitments(p);
}

}  // namespace

TEST(EffectivelyFinal, Examples) {
  const ResolvedProgram p = ct::force_compile(R"(module M {
    void f(final Object x, int y, int z) { y = y + 1; }
  })");
  const MethodDecl& f = p.program.method(ct::find_method(p.program, "f"));
  EXPECT_TRUE(effectively_final(f, 0));
  EXPECT_FALSE(effectively_final(f, 1));
  EXPECT_TRUE(effectively_final(f, 2));
}

TEST(Discharges, CommitChainCallToTwo) {
  const ResolvedProgram p = ct::must_compile(ct::corpus_program("commit_chain"));
  const MethodDecl& one = p.program.method(ct::find_method(p.program, "one"));
  EXPECT_EQ(classify_discharge(p.program, one, 0, first_invocation(one, "two")), DischargeMatch::kDirect);
}

TEST(Discharges, ReassignedPassThroughIsNotFinal) {
  const ResolvedProgram p = ct::force_compile(ct::corpus_program("commit_chain_not_final"));
  const MethodDecl& one = p.program.method(ct::find_method(p.program, "one"));
  EXPECT_EQ(classify_discharge(p.program, one, 0, first_invocation(one, "two")), DischargeMatch::kNotFinal);
  EXPECT_FALSE(discharges(p.program, one, 0, first_invocation(one, "two")));
}

TEST(Discharges, FormJoinExecuteForm) {
  const ResolvedProgram p = ct::must_compile(ct::corpus_program("form_join"));
  const MethodDecl& form = p.program.method(ct::find_method(p.program, "executeForm"));
  EXPECT_TRUE(discharges(p.program, form, 0, first_invocation(form, "reportFormed")));
}

TEST(Discharges, TransitiveThroughCalleeClause) {
  const ResolvedProgram p = ct::force_compile(with_body("relay(a);"));
  const MethodDecl& f = p.program.method(ct::find_method(p.program, "f"));
  EXPECT_EQ(classify_discharge(p.program, f, 0, first_invocation(f, "relay")), DischargeMatch::kTransitive);
}

TEST(Discharges, AliasIsNotTracked) {
  const ResolvedProgram p = ct::force_compile(with_body("int b = a; send g(b);"));
  const MethodDecl& f = p.program.method(ct::find_method(p.program, "f"));
  EXPECT_EQ(classify_discharge(p.program, f, 0, first_invocation(f, "g")), DischargeMatch::kWrongArg);
}

TEST(CheckCommitments, CommitChainIsClean) {
  EXPECT_TRUE(check_commitments(ct::must_compile(ct::corpus_program("commit_chain"))).empty());
}

TEST(CheckCommitments, CommitChainWithoutTwo) {
  const auto errors = errors_of(ct::corpus_program("commit_chain_missing_two"));
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].code, "E_COMMIT_UNDISCHARGED");
}

TEST(CheckCommitments, LoopOnlyDischarge) {
  const auto errors = errors_of(with_body("while (n > 0) { send g(a); n = n - 1; }"));
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].code, "E_LOOP_ONLY_DISCHARGE");
}

TEST(CheckCommitments, WhileTrueGetsNoSpecialCase) {
  const auto errors = errors_of(with_body("while (true) { send g(a); return; }"));
  ASSERT_EQ(errors.size(), 1u);
}

TEST(CheckCommitments, WrongArgument) {
  const auto errors = errors_of(with_body("send g(n);"));
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].code, "E_PASSTHROUGH_ARG");
}

TEST(CheckCommitments, Diamonds) {
  EXPECT_EQ(errors_of(with_body("if (c) { send g(a); }")).size(), 1u);
  EXPECT_EQ(errors_of(with_body("if (c) { send g(a); } else { print 1; }")).size(), 1u);
  EXPECT_EQ(errors_of(with_body("if (c) { send g(a); } else { relay(a); }")).size(), 0u);
  EXPECT_EQ(errors_of(with_body("if (c) { print 1; } send g(a);")).size(), 0u);
}

TEST(CheckCommitments, ThrowPathsAreExempt) {
  EXPECT_TRUE(errors_of(with_body("if (c) { throw \"x\"; } send g(a);")).empty());
  EXPECT_TRUE(errors_of(with_body("throw \"x\";")).empty());
}

TEST(CheckCommitments, EarlyReturnMustDischarge) {
  const auto errors = errors_of(with_body("if (c) { return; } send g(a);"));
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].code, "E_COMMIT_UNDISCHARGED");
  EXPECT_TRUE(errors_of(with_body("send g(a); if (c) { return; }")).empty());
}

TEST(CheckCommitments, CallAndSendBothDischarge) {
  const std::string src = R"(module M {
    void f(final int a) sends h(int a) { h(a); }
    void h(int a) {}
  })";
  EXPECT_TRUE(errors_of(src).empty());
}

TEST(CheckCommitments, OneInvocationMeetsTwoCommitments) {
  const std::string src = R"(module M {
    void f(int a) sends g(int a), h(int a) { both(a); }
    void both(int a) sends g(int a), h(int a) { send g(a); send h(a); }
    event g(int a) {}
    event h(int a) {}
  })";
  EXPECT_TRUE(errors_of(src).empty());
}

TEST(CheckCommitments, DuplicateDischargeIsFine) {
  EXPECT_TRUE(errors_of(with_body("send g(a); send g(a);")).empty());
}

TEST(CheckCommitments, CrossModuleTarget) {
  const std::string src = R"(
    module A { void f(int a) sends g(int a) { send g(a); } }
    module B { event g(int a) {} })";
  EXPECT_TRUE(errors_of(src).empty());
}

TEST(CheckCommitments, OneErrorPerUndischargedCommitment) {
  const std::string src = R"(module M {
    void f(int a, bool c) sends g(int a), h(int a) { if (c) { send g(a); } }
    event g(int a) {}
    event h(int a) {}
  })";
  const auto errors = errors_of(src);
  ASSERT_EQ(errors.size(), 2u);
  EXPECT_EQ(errors[0].commitment, 0);
  EXPECT_EQ(errors[1].commitment, 1);
}

TEST(CheckCommitments, WitnessReplaysToUndischargedExit) {
  const std::string src = with_body(
      "if (c) { send g(a); } else { if (n > 1) { relay(a); } else { print 0; } }");
  const ResolvedProgram p = ct::force_compile(src);
  const auto errors = check_commitments(p);
  ASSERT_EQ(errors.size(), 1u);
  ASSERT_EQ(errors[0].witness.size(), 2u);
  EXPECT_EQ(errors[0].witness[0].kind, EdgeKind::kElse);
  EXPECT_EQ(errors[0].witness[1].kind, EdgeKind::kElse);
  const MethodDecl& f = p.program.method(errors[0].method);
  const auto replay = ct::replay_witness(p.program, f, 0, errors[0].witness);
  EXPECT_TRUE(replay.followed);
  EXPECT_TRUE(replay.normal_exit);
  EXPECT_FALSE(replay.discharged);
  EXPECT_NE(errors[0].message.find("(path: else, else)"), std::string::npos) << errors[0].message;
}

TEST(CheckCommitments, DiagnosticsAreJsonLines) {
  const SourceMap sources("commit_chain_missing_two.cont", ct::corpus_program("commit_chain_missing_two"));
  const CompileResult r = compile(sources);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  const auto j = nlohmann::json::parse(to_json_line(r.diagnostics[0], sources));
  EXPECT_EQ(j["code"], "E_COMMIT_UNDISCHARGED");
  EXPECT_EQ(j["file"], "commit_chain_missing_two.cont");
  EXPECT_EQ(j["line"], 3);
  EXPECT_TRUE(j.contains("col"));
  EXPECT_TRUE(j.contains("message"));
}

TEST(CheckCommitments, UpdateCountStaysWithinBound) {
  for (const auto& entry : std::filesystem::directory_iterator(ct::corpus_dir())) {
    const auto file = entry.path() / "program.cont";
    if (!std::filesystem::exists(file)) continue;
    const CompileResult r = ct::compile_text(ct::read_text(file));
    if (!r.program) continue;
    CommitStats stats;
    check_commitments(*r.program, &stats);
    EXPECT_EQ(stats.bound_violations, 0) << file;
    EXPECT_GT(stats.methods, 0);
  }
}

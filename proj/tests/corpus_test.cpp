#include <gtest/gtest.h>

#include <filesystem>

#include "support/test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> case_names() {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(ct::corpus_dir()))
    if (fs::exists(entry.path() / "program.cont")) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

class CorpusCase : public ::testing::TestWithParam<std::string> {};

}  // namespace

TEST_P(CorpusCase, MatchesGoldens) {
  const fs::path dir = ct::corpus_dir() / GetParam();
  ASSERT_TRUE(fs::exists(dir / "expected.trace.jsonl"));
  ASSERT_TRUE(fs::exists(dir / "expected.exit"));
  const auto r = ct::run_cli({"corpus", ct::corpus_dir().string(), "--only", GetParam()});
  EXPECT_EQ(r.exit, 0) << r.out << r.err;
  EXPECT_EQ(r.out, "PASS " + GetParam() + "\n");
}

TEST_P(CorpusCase, GoldenTraceIsWellFormed) {
  const std::string text = ct::read_text(ct::corpus_dir() / GetParam() / "expected.trace.jsonl");
  std::istringstream in(text);
  std::uint64_t seq = 0;
  for (std::string line; std::getline(in, line); ++seq) {
    const auto j = nlohmann::ordered_json::parse(line);
    ASSERT_EQ(j["seq"], seq);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys, (std::vector<std::string>{"seq", "kind", "vm", "method", "details"}));
  }
}

INSTANTIATE_TEST_SUITE_P(All, CorpusCase, ::testing::ValuesIn(case_names()),
                         [](const auto& info) { return info.param; });

TEST(Corpus, HasEnoughCases) { EXPECT_GE(case_names().size(), 10u); }

TEST(Corpus, DetectsTamperedGolden) {
  ct::TempDir tmp;
  fs::copy(ct::corpus_dir() / "commit_chain", tmp.path() / "commit_chain");
  std::string trace = ct::read_text(tmp.path() / "commit_chain" / "expected.trace.jsonl");
  trace = ct::replace_once(trace, "\"three 6\"", "\"three 7\"");
  ct::write_text(tmp.path() / "commit_chain" / "expected.trace.jsonl", trace);
  const auto r = ct::run_cli({"corpus", tmp.path().string()});
  EXPECT_EQ(r.exit, 1);
  EXPECT_EQ(r.out.rfind("FAIL commit_chain", 0), 0u) << r.out;
}

TEST(Corpus, UpdateRewritesGoldens) {
  ct::TempDir tmp;
  fs::copy(ct::corpus_dir() / "transfer", tmp.path() / "transfer");
  fs::remove(tmp.path() / "transfer" / "expected.trace.jsonl");
  fs::remove(tmp.path() / "transfer" / "expected.exit");
  EXPECT_EQ(ct::run_cli({"corpus", tmp.path().string(), "--update"}).exit, 0);
  EXPECT_EQ(ct::read_text(tmp.path() / "transfer" / "expected.trace.jsonl"),
            ct::read_text(ct::corpus_dir() / "transfer" / "expected.trace.jsonl"));
  EXPECT_EQ(ct::run_cli({"corpus", tmp.path().string()}).exit, 0);
}

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <json.hpp>

#include "support.hpp"

namespace t = hoarefix::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(HOAREFIX_CLI) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    t::write_file(dir.path() / "abs_buggy.dfy", t::kAbsBuggy);
    t::write_file(dir.path() / "abs.dfy", t::abs_fixed());
    t::write_file(dir.path() / "bad.dfy", "method m( {\n");
    t::write_file(dir.path() / "arr.dfy", "method m(a: array<int>) {\n}\n");
  }
  std::string path(const std::string& name) const { return (dir.path() / name).string(); }
  t::TempDir dir;
};

}  // namespace

TEST_F(Cli, VerifyExitCodes) {
  const Outcome ok = run("verify " + path("abs.dfy") + " --backend brute");
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(ok.out).at("verified").get<bool>());
  const Outcome bad = run("verify " + path("abs_buggy.dfy") + " --backend brute");
  EXPECT_EQ(bad.code, 1);
  const auto j = nlohmann::json::parse(bad.out);
  const auto& entailments = j.at("methods").at(0).at("entailments");
  ASSERT_EQ(entailments.size(), 4u);
  EXPECT_EQ(entailments.at(3).at("verdict").at("status"), "invalid");
  EXPECT_EQ(run("verify " + path("bad.dfy")).code, 2);
  EXPECT_EQ(run("verify " + path("missing.dfy")).code, 2);
  EXPECT_EQ(run("verify " + path("abs.dfy") + " --bound 17").code, 2);
  EXPECT_EQ(run("verify " + path("abs.dfy") + " --solver no-such-solver-binary").code, 3);
}

TEST_F(Cli, Localize) {
  const Outcome r = run("localize " + path("abs_buggy.dfy") + " --backend brute");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out).at("ranking").at("lines").at(0).at("line"), 8);
  const Outcome clean = run("localize " + path("abs.dfy") + " --backend brute");
  EXPECT_EQ(clean.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(clean.out).at("ranking").at("lines").empty());
  EXPECT_EQ(run("localize " + path("arr.dfy")).code, 2);
}

TEST_F(Cli, RepairWithMock) {
  const Outcome r = run("repair " + path("abs_buggy.dfy") + " --backend brute");
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("patches").at(0).at("line"), 8);
  EXPECT_EQ(t::read_file(dir.path() / "abs_buggy.fixed.dfy"), t::abs_fixed());
  EXPECT_TRUE(fs::exists(dir.path() / "abs_buggy.transcript.jsonl"));
}

TEST_F(Cli, RepairUnfixable) {
  // No single-line edit can satisfy a contradictory contract.
  t::write_file(dir.path() / "never.dfy",
                "method never(x: int) returns (r: int)\n  ensures r > x && r < x\n{\n  r := x + 1;\n}\n");
  const Outcome r = run("repair " + path("never.dfy") + " --backend brute");
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(fs::exists(dir.path() / "never.transcript.jsonl"));
}

TEST_F(Cli, RemoteModelWithoutKey) {
  const Outcome r = run("repair " + path("abs_buggy.dfy") + " --backend brute --model-url http://127.0.0.1:9/v1",
                    "env -u OPENAI_API_KEY");
  EXPECT_EQ(r.code, 3);
  EXPECT_FALSE(fs::exists(dir.path() / "abs_buggy.transcript.jsonl"));
}

TEST_F(Cli, MutateAndEval) {
  const std::string ds = path("ds");
  const Outcome m = run("mutate " + t::corpus_dir().string() + " --out " + ds + " --seed 7 --backend brute");
  EXPECT_EQ(m.code, 0);
  EXPECT_NE(m.out.find("mutants:"), std::string::npos);
  EXPECT_EQ(run("mutate " + t::corpus_dir().string() + " --out " + ds + " --backend brute").code, 2);
  const Outcome e = run("eval " + ds + " --backend brute --filter op");
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("\"success_rate\": 100.0"), std::string::npos) << e.out;
  EXPECT_TRUE(fs::exists(fs::path(ds) / "Repair" / "mock" / "metrics.json"));
  EXPECT_TRUE(fs::exists(fs::path(ds) / "Repair" / "mock" / "metrics.csv"));
  EXPECT_EQ(run("eval " + path("nowhere") + " --backend brute").code, 2);
}

TEST_F(Cli, EvalBothBackendsReportsNoDisagreement) {
  if (!t::z3_available()) GTEST_SKIP() << "z3 not on PATH";
  const std::string ds = path("ds");
  ASSERT_EQ(run("mutate " + t::corpus_dir().string() + " --out " + ds + " --seed 7 --backend brute").code, 0);
  const Outcome e = run("eval " + ds + " --backend both --filter op");
  EXPECT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("backend disagreements: 0"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("verify " + path("abs.dfy") + " --backend dafny").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

#include <gtest/gtest.h>

#include <random>

#include "hoarefix/entail.hpp"
#include "support.hpp"

using namespace hoarefix;
using namespace hoarefix::entail;
namespace t = hoarefix::testing;

namespace {

hoare::Analysis abs_analysis() {
  static const auto p = lang::parse_program(t::kAbsBuggy);
  return hoare::propagate(p.methods[0]);
}

/// Entailment built from source-level formulas over int symbols.
hoare::Entailment make_entailment(const std::vector<std::string>& hyps, const std::string& concl,
                                  const std::vector<std::string>& symbols) {
  std::vector<lang::Param> scope;
  for (const auto& s : symbols) scope.push_back({s});
  hoare::Entailment e;
  for (const auto& h : hyps) e.hypothesis.push_back(hoare::StateCondition{lang::parse_expression(h, scope), 1});
  e.conclusion = lang::parse_expression(concl, scope);
  for (const auto& s : symbols) e.symbols[s] = lang::Type::Int;
  return e;
}

SolverConfig solver() { return SolverConfig{}; }

#define REQUIRE_Z3() \
  if (!t::z3_available()) GTEST_SKIP() << "z3 not on PATH"

}  // namespace

TEST(Smt, ScriptShape) {
  const auto a = abs_analysis();
  const std::string script = to_smt(a.entailments[3]);
  EXPECT_NE(script.find("(declare-const x Int)"), std::string::npos) << script;
  EXPECT_NE(script.find("(declare-const res Int)"), std::string::npos);
  EXPECT_NE(script.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(script, to_smt(a.entailments[3]));
}

TEST(Smt, ReservedNamesAreQuoted) {
  const auto e = make_entailment({"div == 1"}, "div > 0", {"div"});
  const std::string script = to_smt(e);
  EXPECT_EQ(script.find("(declare-const div Int)"), std::string::npos) << script;
}

TEST(Smt, AbsVerdicts) {
  REQUIRE_Z3();
  const auto a = abs_analysis();
  const Status expected[] = {Status::Valid, Status::Valid, Status::Valid, Status::Invalid};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(check_smt(a.entailments[i], solver()).status, expected[i]) << i;
  const Verdict v = check_smt(a.entailments[3], solver());
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_LT(v.counterexample->at("x"), 0);
  EXPECT_TRUE(falsifies(a.entailments[3], *v.counterexample));
}

TEST(Smt, TrivialScripts) {
  REQUIRE_Z3();
  EXPECT_EQ(check_smt(make_entailment({"x == 1"}, "x == 1", {"x"}), solver()).status, Status::Valid);
  EXPECT_EQ(check_smt(make_entailment({}, "true", {}), solver()).status, Status::Valid);
}

TEST(Smt, DivisionByZeroIsExcluded) {
  REQUIRE_Z3();
  // With d == 0 excluded the identity holds; brute force skips the same tuples.
  const auto e = make_entailment({}, "(n / d) * d + n % d == n", {"n", "d"});
  EXPECT_EQ(check_smt(e, solver()).status, Status::Valid);
  EXPECT_EQ(check_bruteforce(e, 5).status, Status::Valid);
}

TEST(Smt, EuclideanSemanticsMatch) {
  REQUIRE_Z3();
  const auto e = make_entailment({"n == -7", "d == 2"}, "n / d == -4 && n % d == 1", {"n", "d"});
  EXPECT_EQ(check_smt(e, solver()).status, Status::Valid);
  EXPECT_EQ(check_bruteforce(e, 8).status, Status::Valid);
}

TEST(Smt, TimeoutIsReported) {
  REQUIRE_Z3();
  // Nonlinear query that z3 cannot settle within a millisecond.
  const auto e = make_entailment({"x * x * x + y * y * y == z * z * z", "x > 0", "y > 0"}, "z < 0 || z > 1000",
                                 {"x", "y", "z"});
  SolverConfig cfg;
  cfg.timeout_ms = 1;
  EXPECT_EQ(check_smt(e, cfg).status, Status::Timeout);
}

TEST(Smt, MissingExecutable) {
  SolverConfig cfg;
  cfg.executable = "definitely-not-a-solver-binary";
  EXPECT_THROW(check_smt(make_entailment({}, "true", {}), cfg), SolverNotFound);
}

TEST(Smt, GarbageOutputIsProtocolError) {
  SolverConfig cfg;
  cfg.executable = "echo";
  cfg.args = {"surprise"};
  EXPECT_THROW(check_smt(make_entailment({}, "true", {}), cfg), SolverProtocolError);
}

TEST(Smt, DumpDirectory) {
  REQUIRE_Z3();
  t::TempDir dir;
  SolverConfig cfg;
  cfg.dump_dir = dir.path();
  check_smt(abs_analysis().entailments[3], cfg);
  std::size_t files = 0;
  for (const auto& f : std::filesystem::directory_iterator(dir.path())) files += f.path().extension() == ".smt2";
  EXPECT_GE(files, 1u);
}

TEST(Brute, AbsCounterexample) {
  const auto a = abs_analysis();
  const Verdict v = check_bruteforce(a.entailments[3], 3);
  EXPECT_EQ(v.status, Status::Invalid);
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_LT(v.counterexample->at("x"), 0);
  EXPECT_TRUE(falsifies(a.entailments[3], *v.counterexample));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(check_bruteforce(a.entailments[i], 3).status, Status::Valid);
}

TEST(Brute, Identities) {
  for (int bound : {1, 3, 5, 16}) {
    EXPECT_EQ(check_bruteforce(make_entailment({}, "x * 0 == 0", {"x"}), bound).status, Status::Valid);
    EXPECT_EQ(check_bruteforce(make_entailment({}, "x * 2 == x + x", {"x"}), bound).status, Status::Valid);
  }
}

TEST(Brute, FirstCounterexampleIsSmallest) {
  const Verdict v = check_bruteforce(make_entailment({}, "x > 0", {"x"}), 5);
  ASSERT_TRUE(v.counterexample);
  EXPECT_EQ(v.counterexample->at("x"), 0);
}

TEST(Brute, Guards) {
  EXPECT_THROW(check_bruteforce(make_entailment({}, "true", {}), 0), BoundTooLarge);
  EXPECT_THROW(check_bruteforce(make_entailment({}, "true", {}), kMaxBound + 1), BoundTooLarge);
  EXPECT_THROW(check_bruteforce(make_entailment({}, "a + b + c + d + e + f + g > 0", {"a", "b", "c", "d", "e", "f", "g"}), 2),
               TooManySymbols);
}

TEST(Brute, DefinedSymbolsAreNotEnumerated) {
  const auto e = make_entailment({"y == x + 1", "z == y * 2"}, "z == 2 * x + 2", {"x", "y", "z"});
  EXPECT_EQ(enumerated_symbols(e), std::vector<std::string>{"x"});
  EXPECT_EQ(check_bruteforce(e, 5).status, Status::Valid);
}

TEST(Brute, OverflowTuplesAreSkipped) {
  const auto e = make_entailment({"x == 9223372036854775807"}, "x + 1 > x", {"x"});
  EXPECT_EQ(check_bruteforce(e, 2).status, Status::Valid);
}

TEST(Evaluate, Reference) {
  const std::vector<lang::Param> scope = {{"a"}, {"b"}};
  const Model env = {{"a", -7}, {"b", 2}};
  EXPECT_EQ(eval_int(*lang::parse_expression("a / b", scope), env), -4);
  EXPECT_EQ(eval_int(*lang::parse_expression("a % b", scope), env), 1);
  EXPECT_EQ(eval_int(*lang::parse_expression("a / (b - 2)", scope), env), std::nullopt);
  EXPECT_EQ(eval_bool(*lang::parse_expression("a < b ==> b > 0", scope), env), true);
}

// Counterexamples from both backends falsify under an evaluator that shares
// no code with the enumeration loop.
TEST(Property, CounterexamplesFalsify) {
  std::mt19937_64 rng(7);
  const char* ops[] = {"+", "-", "*", "/", "%"};
  for (int i = 0; i < 300; ++i) {
    const std::string lhs = std::string("a ") + ops[rng() % 5] + " b";
    const std::string rhs = std::string("b ") + ops[rng() % 5] + " " + std::to_string(rng() % 4 + 1);
    const auto e = make_entailment({"a >= " + std::to_string(static_cast<int>(rng() % 5) - 2)}, lhs + " <= " + rhs,
                                   {"a", "b"});
    const Verdict v = check_bruteforce(e, 5);
    if (v.status == Status::Invalid) {
      ASSERT_TRUE(v.counterexample);
      EXPECT_TRUE(falsifies(e, *v.counterexample)) << e.to_string();
    }
  }
}

TEST(Property, BackendAgreementOnCorpus) {
  REQUIRE_Z3();
  std::size_t checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(t::corpus_dir())) {
    const auto p = lang::parse_program(t::read_file(entry.path()));
    for (const auto& m : p.methods) {
      for (const auto& e : hoare::propagate(m).entailments) {
        if (symbol_order(e).size() > kAgreementSymbolLimit) continue;
        const Verdict smt = check_smt(e, solver());
        const Verdict brute = check_bruteforce(e, 5);
        if (brute.status == Status::Invalid) EXPECT_EQ(smt.status, Status::Invalid) << e.to_string();
        if (smt.status == Status::Valid) EXPECT_NE(brute.status, Status::Invalid) << e.to_string();
        if (smt.status == Status::Invalid && smt.counterexample) EXPECT_TRUE(falsifies(e, *smt.counterexample));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 20u);
}

TEST(Verify, AbsBuggyAndFixed) {
  BackendOptions brute;
  brute.backend = Backend::Brute;
  const auto buggy = verify_program(lang::parse_program(t::kAbsBuggy), brute);
  EXPECT_FALSE(buggy.verified());
  std::vector<std::uint32_t> failing;
  for (const auto& [id, v] : buggy.results[0].verdicts) {
    if (v.status != Status::Valid) failing.push_back(id);
  }
  EXPECT_EQ(failing, std::vector<std::uint32_t>{3});
  EXPECT_TRUE(verify_program(lang::parse_program(t::abs_fixed()), brute).verified());
  EXPECT_TRUE(verify_program(lang::parse_program("method m()\n  ensures true\n{\n}\n"), brute).verified());
}

TEST(Verify, BothBackendsAgreeOnAbs) {
  REQUIRE_Z3();
  BackendOptions both;
  both.backend = Backend::Both;
  const auto v = verify_program(lang::parse_program(t::kAbsBuggy), both);
  EXPECT_FALSE(v.verified());
  EXPECT_TRUE(v.results[0].disagreements.empty());
}

TEST(Verify, ParallelMatchesSerial) {
  BackendOptions serial;
  serial.backend = Backend::Brute;
  BackendOptions parallel = serial;
  parallel.jobs = 4;
  const auto p = lang::parse_program(t::read_file(t::corpus_dir() / "SumTo.dfy"));
  const auto a = verify_program(p, serial);
  const auto b = verify_program(p, parallel);
  ASSERT_EQ(a.results[0].verdicts.size(), b.results[0].verdicts.size());
  for (const auto& [id, v] : a.results[0].verdicts) EXPECT_EQ(v.status, b.results[0].verdicts.at(id).status);
}

TEST(Verify, ManyEntailmentsKeepNumericOrder) {
  std::string src = "method many(x: int) returns (r: int)\n";
  for (int i = 0; i < 12; ++i) src += "  ensures r >= x + " + std::to_string(i) + " - 20\n";
  src += "{\n  r := x;\n}\n";
  BackendOptions brute;
  brute.backend = Backend::Brute;
  const auto v = verify_program(lang::parse_program(src), brute);
  std::vector<std::uint32_t> ids;
  for (const auto& [id, verdict] : v.results[0].verdicts) ids.push_back(id);
  ASSERT_EQ(ids.size(), 12u);
  for (std::uint32_t i = 0; i < ids.size(); ++i) EXPECT_EQ(ids[i], i);
}

TEST(Backend, Parse) {
  EXPECT_EQ(parse_backend("smt"), Backend::Smt);
  EXPECT_EQ(parse_backend("brute"), Backend::Brute);
  EXPECT_EQ(parse_backend("both"), Backend::Both);
  EXPECT_EQ(parse_backend("dafny"), std::nullopt);
}

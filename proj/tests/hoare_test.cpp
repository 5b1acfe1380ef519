#include <gtest/gtest.h>

#include "hoarefix/hoare.hpp"
#include "support.hpp"

using namespace hoarefix;
using namespace hoarefix::hoare;
namespace t = hoarefix::testing;

namespace {

const lang::Method& only_method(const lang::Program& p) { return p.methods.at(0); }

std::string formula_at(const Entailment& e, int origin) {
  for (const auto& c : e.hypothesis) {
    if (c.origin == origin) return lang::to_string(*c.formula);
  }
  return "";
}

}  // namespace

TEST(Propagate, AbsFourPostconditions) {
  const auto p = lang::parse_program(t::kAbsBuggy);
  const Analysis a = propagate(only_method(p));
  ASSERT_EQ(a.entailments.size(), 4u);
  EXPECT_EQ(a.entailments[0].to_string(), "(x >= 0 && res == x) ==> (x >= 0 ==> res == x)");
  EXPECT_EQ(a.entailments[1].to_string(), "(x >= 0 && res == x) ==> (x < 0 ==> res == -x)");
  EXPECT_EQ(a.entailments[2].to_string(), "(x < 0 && res == x * 1) ==> (x >= 0 ==> res == x)");
  EXPECT_EQ(a.entailments[3].to_string(), "(x < 0 && res == x * 1) ==> (x < 0 ==> res == -x)");
  for (const auto& e : a.entailments) EXPECT_EQ(e.kind, EntailmentKind::Postcondition);
  EXPECT_EQ(a.entailments[0].control_point, 6);
  EXPECT_EQ(a.entailments[3].control_point, 8);
}

TEST(Propagate, SuccessiveUpdatesFold) {
  const auto p = lang::parse_program(
      "method s3() returns (s: int)\n"
      "  ensures s == 4\n"
      "{\n"
      "  s := 1 + 2;\n"
      "  s := s + 1;\n"
      "}\n");
  const Analysis a = propagate(only_method(p));
  ASSERT_EQ(a.entailments.size(), 1u);
  const Entailment& e = a.entailments[0];
  EXPECT_EQ(formula_at(e, 5), "s == 1 + 2 + 1");
  EXPECT_EQ(formula_at(e, 4), "");  // superseded
  EXPECT_EQ(e.control_point, 6);
}

TEST(Propagate, EmptyBodyEnsuresTrue) {
  const auto p = lang::parse_program("method m(x: int)\n  requires x > 0\n  ensures true\n{\n}\n");
  const Analysis a = propagate(only_method(p));
  ASSERT_EQ(a.entailments.size(), 1u);
  ASSERT_EQ(a.entailments[0].hypothesis.size(), 1u);
  EXPECT_FALSE(a.entailments[0].hypothesis[0].origin.has_value());
  EXPECT_EQ(lang::to_string(*a.entailments[0].hypothesis[0].formula), "x > 0");
  EXPECT_EQ(lang::to_string(*a.entailments[0].conclusion), "true");
}

TEST(Propagate, LoopEntailmentKinds) {
  const auto p = lang::parse_program(t::read_file(t::corpus_dir() / "SumTo.dfy"));
  const Analysis a = propagate(only_method(p));
  std::vector<EntailmentKind> kinds;
  for (const auto& e : a.entailments) kinds.push_back(e.kind);
  EXPECT_EQ(kinds, (std::vector<EntailmentKind>{EntailmentKind::LoopInit, EntailmentKind::LoopInit,
                                                EntailmentKind::LoopMaintain, EntailmentKind::LoopMaintain,
                                                EntailmentKind::Postcondition}));
  EXPECT_EQ(a.entailments[0].control_point, 7);
  // Post-loop state carries the negated guard.
  const auto& post = a.entailments.back();
  bool negated_guard = false;
  for (const auto& c : post.hypothesis) negated_guard |= lang::to_string(*c.formula).find(">= n") != std::string::npos;
  EXPECT_TRUE(negated_guard) << post.to_string();
}

TEST(Propagate, IdsDenseAndNumeric) {
  for (const auto& entry : std::filesystem::directory_iterator(t::corpus_dir())) {
    const auto p = lang::parse_program(t::read_file(entry.path()));
    for (const auto& m : p.methods) {
      const Analysis a = propagate(m);
      for (std::size_t i = 0; i < a.entailments.size(); ++i) EXPECT_EQ(a.entailments[i].id, i);
    }
  }
}

TEST(Propagate, AttributionPointsAtWritingStatements) {
  for (const auto& entry : std::filesystem::directory_iterator(t::corpus_dir())) {
    SCOPED_TRACE(entry.path().string());
    const auto p = lang::parse_program(t::read_file(entry.path()));
    for (const auto& m : p.methods) {
      for (const auto& e : propagate(m).entailments) {
        for (const auto& c : e.hypothesis) {
          if (!c.origin) continue;
          const lang::Stmt* s = m.statement_at(*c.origin);
          ASSERT_NE(s, nullptr) << *c.origin;
        }
      }
    }
  }
}

TEST(Propagate, ConclusionSymbolsAreCovered) {
  for (const auto& entry : std::filesystem::directory_iterator(t::corpus_dir())) {
    const auto p = lang::parse_program(t::read_file(entry.path()));
    for (const auto& m : p.methods) {
      std::set<std::string> allowed;
      for (const auto& prm : m.params) allowed.insert(prm.name);
      for (const auto& r : m.returns) allowed.insert(r.name);
      for (const auto& e : propagate(m).entailments) {
        for (const auto& c : e.hypothesis) {
          for (const auto& v : lang::free_variables(*c.formula)) allowed.insert(v);
        }
        for (const auto& v : lang::free_variables(*e.conclusion)) {
          EXPECT_TRUE(allowed.count(v)) << entry.path() << ": " << v;
        }
      }
    }
  }
}

TEST(Propagate, PathCap) {
  std::string src = "method m(x: int) returns (r: int)\n  ensures true\n{\n  r := 0;\n";
  for (int i = 0; i < 10; ++i) src += "  if (x > " + std::to_string(i) + ") {\n    r := r + 1;\n  }\n";
  src += "}\n";
  const auto p = lang::parse_program(src);
  EXPECT_THROW(propagate(only_method(p), PropagateOptions{64}), NonLinearPathExplosion);
  EXPECT_NO_THROW(propagate(only_method(p), PropagateOptions{1024}));
}

TEST(Substitute, Examples) {
  const std::vector<lang::Param> scope = {{"x"}, {"y"}, {"res"}, {"x0"}, {"s"}};
  auto expr = [&](const char* s) { return lang::parse_expression(s, scope); };
  EXPECT_EQ(lang::to_string(substitute(expr("x > 0"), "y", expr("5"))), "x > 0");
  EXPECT_EQ(lang::to_string(substitute(expr("res == x"), "x", expr("-x0"))), "res == -x0");
  EXPECT_EQ(lang::to_string(substitute(expr("s == s + 1"), "s", expr("1 + 2"))), "1 + 2 == 1 + 2 + 1");
  EXPECT_EQ(lang::to_string(substitute(expr("x * 2"), "x", expr("y + 1"))), "(y + 1) * 2");
  EXPECT_EQ(lang::to_string(substitute(expr("y - x"), "x", expr("y - 1"))), "y - (y - 1)");
}

TEST(Negate, FlipsComparisons) {
  const std::vector<lang::Param> scope = {{"x"}, {"n"}};
  EXPECT_EQ(lang::to_string(negate(lang::parse_expression("x < n", scope))), "x >= n");
  EXPECT_EQ(lang::to_string(negate(lang::parse_expression("x == n", scope))), "x != n");
}

TEST(AssignmentSites, Examples) {
  EXPECT_TRUE(assignment_sites(only_method(lang::parse_program(t::kAbsBuggy))).empty());
  const auto p = lang::parse_program("method m() returns (s: int)\n{\n  s := 1 + 2;\n  s := s + 1;\n}\n");
  EXPECT_EQ(assignment_sites(only_method(p)), (std::vector<AssignmentSite>{{3, "s"}, {4, "s"}}));
  const auto loop = lang::parse_program(t::read_file(t::corpus_dir() / "SumTo.dfy"));
  EXPECT_EQ(assignment_sites(only_method(loop)),
            (std::vector<AssignmentSite>{{5, "i"}, {6, "s"}, {11, "i"}, {12, "s"}}));
}

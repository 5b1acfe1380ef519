#include <algorithm>
#include <set>

#include "hoarefix/lexer.hpp"
#include "hoarefix/mutate.hpp"
#include "hoarefix/repair.hpp"

namespace hoarefix::repair {

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"return", "var", "if", "while", "else", "int", "bool", "true", "false",
                                          "invariant", "decreases"};
  return k;
}

bool operand_start(const lang::Token& t) {
  return (t.kind == lang::TokenKind::Identifier && !keywords().count(t.text)) ||
         t.kind == lang::TokenKind::Integer || t.is("(");
}

/// A `-` is binary when it follows something that ends an operand.
bool ends_operand(const lang::Token* prev) {
  if (!prev) return false;
  if (prev->is(")")) return true;
  if (prev->kind == lang::TokenKind::Integer) return true;
  return prev->kind == lang::TokenKind::Identifier && !keywords().count(prev->text);
}

/// Drops `* 1` and `/ 1` factors, which never change the value.
std::string drop_unit_factors(const std::string& text) {
  std::vector<lang::Token> toks;
  try {
    toks = lang::tokenize(text).tokens;
  } catch (const lang::LangError&) {
    return text;
  }
  std::string out = text;
  for (std::size_t i = toks.size(); i-- > 1;) {
    if (!(toks[i - 1].is("*") || toks[i - 1].is("/")) || toks[i].kind != lang::TokenKind::Integer ||
        toks[i].text != "1" || !ends_operand(i >= 2 ? &toks[i - 2] : nullptr)) {
      continue;
    }
    std::size_t start = static_cast<std::size_t>(toks[i - 1].column - 1);
    while (start > 0 && out[start - 1] == ' ') --start;
    out.erase(start, static_cast<std::size_t>(toks[i].column) + toks[i].text.size() - 1 - start);
  }
  return out;
}

struct Editor {
  std::string line;
  std::vector<std::string> out;
  std::set<std::string> seen;

  void keep(std::string c) {
    c = drop_unit_factors(c);
    if (seen.insert(mutate::normalize(c)).second) out.push_back(std::move(c));
  }

  void emit(std::size_t col, std::size_t len, const std::string& text) {
    std::string c = line;
    c.replace(col - 1, len, text);
    keep(std::move(c));
  }

  void emit_swap(const lang::Token& a, const lang::Token& b) {
    std::string c = line;
    // Right token first so the left column stays valid.
    c.replace(static_cast<std::size_t>(b.column - 1), b.text.size(), a.text);
    c.replace(static_cast<std::size_t>(a.column - 1), a.text.size(), b.text);
    keep(std::move(c));
  }
};

}  // namespace

std::vector<std::string> mock_candidates(std::string_view line_text) {
  Editor ed;
  ed.line = lang::strip_marker(line_text);
  ed.seen.insert(mutate::normalize(ed.line));
  ed.seen.insert(mutate::normalize(drop_unit_factors(ed.line)));
  std::vector<lang::Token> toks;
  try {
    toks = lang::tokenize(ed.line).tokens;
  } catch (const lang::LangError&) {
    return {};
  }
  if (!toks.empty() && toks.back().kind == lang::TokenKind::End) toks.pop_back();

  // Assignment target and declared name are not operands.
  std::size_t first_operand = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].is(":=")) {
      first_operand = i + 1;
      break;
    }
  }

  std::vector<std::size_t> binary_ops, unary_minus, operands, literals, variables;
  for (std::size_t i = first_operand; i < toks.size(); ++i) {
    const auto& t = toks[i];
    const lang::Token* prev = i > 0 ? &toks[i - 1] : nullptr;
    if (t.is("+") || t.is("*") || t.is("/") || t.is("%")) {
      binary_ops.push_back(i);
    } else if (t.is("-")) {
      (ends_operand(prev) ? binary_ops : unary_minus).push_back(i);
    } else if (operand_start(t) && !(prev && prev->is("-") && !ends_operand(i > 1 ? &toks[i - 2] : nullptr))) {
      // A guard's own parentheses are boolean, and `-0` is a no-op.
      const bool guard_paren = t.is("(") && prev && (prev->is("if") || prev->is("while"));
      if (!guard_paren && t.text != "0") operands.push_back(i);
    }
    if (t.kind == lang::TokenKind::Integer) literals.push_back(i);
    if (t.kind == lang::TokenKind::Identifier && !keywords().count(t.text)) variables.push_back(i);
  }
  auto col = [&](std::size_t i) { return static_cast<std::size_t>(toks[i].column); };

  for (std::size_t i : binary_ops) {
    const std::string& op = toks[i].text;
    if (op == "+") ed.emit(col(i), 1, "-");
    if (op == "-") ed.emit(col(i), 1, "+");
    if (op == "*") ed.emit(col(i), 1, "/");
    if (op == "/") {
      ed.emit(col(i), 1, "*");
      ed.emit(col(i), 1, "%");
    }
    if (op == "%") ed.emit(col(i), 1, "/");
  }
  for (std::size_t i : unary_minus) ed.emit(col(i), 1, "");
  for (std::size_t i : operands) ed.emit(col(i), 0, "-");
  for (std::size_t i : literals) {
    const std::int64_t v = std::stoll(toks[i].text);
    const std::size_t len = toks[i].text.size();
    ed.emit(col(i), len, std::to_string(v + 1));
    if (v > 0) ed.emit(col(i), len, std::to_string(v - 1));
    if (v != 0) ed.emit(col(i), len, "(-" + toks[i].text + ")");
  }
  for (std::size_t a = 0; a < variables.size(); ++a) {
    for (std::size_t b = a + 1; b < variables.size(); ++b) {
      if (toks[variables[a]].text != toks[variables[b]].text) ed.emit_swap(toks[variables[a]], toks[variables[b]]);
    }
  }
  return ed.out;
}

std::string MockModel::complete(const Prompt& prompt) {
  const auto line = marked_line(prompt.user);
  if (!line) return "";
  const auto rejected = rejected_candidates(prompt.user);
  std::set<std::string> skip;
  for (const auto& r : rejected) skip.insert(mutate::normalize(r));
  for (const auto& c : mock_candidates(*line)) {
    if (!skip.count(mutate::normalize(c))) return c;
  }
  return "";
}

}  // namespace hoarefix::repair

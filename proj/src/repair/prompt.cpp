#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

#include "hoarefix/repair.hpp"

namespace hoarefix::repair {

const std::string kSystemPrompt =
    "You are a software expert specializing in formal methods using the Dafny programming language. "
    "You receive the following program where a verifier error message indicates an issue. "
    "The error is due to a buggy line, which is marked with the comment '//buggy line'. \n"
    "Your task is to correct the buggy line to ensure the program verifies successfully.\n"
    "Do not include explanations.\n"
    "Return only fixed line.\n"
    "Here is the code: ";

namespace {

constexpr std::string_view kRejectedPrefix = "Do not repeat this rejected fix: ";

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t nl = text.find('\n', start);
    std::string line(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

bool has_marker(std::string_view line) {
  const std::size_t pos = line.find("//");
  return pos != std::string_view::npos && lang::is_marker_comment(line.substr(pos));
}

}  // namespace

LineNotFound::LineNotFound(int line) : std::invalid_argument("line " + std::to_string(line) + " is not in a method") {}

Prompt build_prompt(const lang::Program& p, int line, const std::vector<std::string>& rejected) {
  const lang::Method* m = p.method_at(line);
  if (!m) throw LineNotFound(line);
  std::string code;
  for (int l = m->first_line(); l <= m->last_line(); ++l) {
    std::string text = lang::strip_marker(p.line_text(l));
    if (l == line) text += " " + std::string(lang::kMarker);
    if (!code.empty()) code += '\n';
    code += text;
  }
  for (const auto& r : rejected) code += "\n" + std::string(kRejectedPrefix) + r;
  Prompt prompt;
  prompt.system = kSystemPrompt;
  prompt.user = code + std::string(kUserSuffix);
  return prompt;
}

std::optional<std::string> marked_line(std::string_view user_text) {
  for (const auto& line : split(user_text)) {
    if (has_marker(line)) return lang::strip_marker(line);
  }
  return std::nullopt;
}

std::vector<std::string> rejected_candidates(std::string_view user_text) {
  std::vector<std::string> out;
  for (const auto& line : split(user_text)) {
    if (line.rfind(kRejectedPrefix, 0) == 0) out.push_back(line.substr(kRejectedPrefix.size()));
  }
  return out;
}

namespace {

std::string strip_wrapping(std::string s) {
  for (bool changed = true; changed;) {
    changed = false;
    s = trim(s);
    if (s.size() >= 2) {
      const char a = s.front(), b = s.back();
      if ((a == '"' && b == '"') || (a == '\'' && b == '\'') || (a == '`' && b == '`')) {
        s = s.substr(1, s.size() - 2);
        changed = true;
      }
    }
  }
  return s;
}

std::string strip_label(const std::string& s) {
  static const std::regex label(R"(^(fixed\s+line|corrected\s+line|fixed|fix|answer|corrected|solution|patch)\s*:\s*)",
                                std::regex::icase);
  return std::regex_replace(s, label, "", std::regex_constants::format_first_only);
}

std::string strip_comment(const std::string& s) {
  const std::size_t pos = s.find("//");
  return pos == std::string::npos ? s : trim(s.substr(0, pos));
}

std::optional<std::string> as_statement(std::string s) {
  static const std::regex simple(R"(^(return\b.*|var\s+[A-Za-z_][\w'?]*.*|[A-Za-z_][\w'?]*\s*:=.*)$)");
  static const std::regex guard(R"(^(\}\s*else\s+)?(if|while)\b.*$)");
  s = strip_comment(strip_label(strip_wrapping(s)));
  s = strip_wrapping(s);
  if (s.empty()) return std::nullopt;
  if (std::regex_match(s, simple)) {
    while (!s.empty() && s.back() == ';' && s.size() >= 2 && s[s.size() - 2] == ';') s.pop_back();
    if (s.back() != ';') s += ';';
    return s;
  }
  if (std::regex_match(s, guard)) return s;
  return std::nullopt;
}

}  // namespace

std::string sanitize_response(std::string_view raw) {
  if (trim(raw).empty()) throw EmptyResponse("empty response");
  static const std::regex inline_code("`([^`]+)`");
  bool any_text = false;
  for (const auto& raw_line : split(raw)) {
    const std::string line = trim(raw_line);
    if (line.rfind("```", 0) == 0) continue;  // fence, possibly with a language tag
    if (line.empty()) continue;
    any_text = true;
    for (auto it = std::sregex_iterator(line.begin(), line.end(), inline_code); it != std::sregex_iterator(); ++it) {
      if (auto s = as_statement((*it)[1].str())) return *s;
    }
    if (auto s = as_statement(line)) return *s;
  }
  throw EmptyResponse(any_text ? "no statement in response" : "empty response");
}

}  // namespace hoarefix::repair

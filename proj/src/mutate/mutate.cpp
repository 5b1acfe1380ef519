#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "hoarefix/mutate.hpp"

namespace hoarefix::mutate {

using lang::BinaryOp;
using lang::Expr;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::OperatorReplacement: return "OperatorReplacement";
    case Strategy::CoefficientModification: return "CoefficientModification";
    case Strategy::VariableReordering: return "VariableReordering";
    case Strategy::Combined: return "Combined";
  }
  return "?";
}

std::string_view tag(Strategy s) {
  switch (s) {
    case Strategy::OperatorReplacement: return "op";
    case Strategy::CoefficientModification: return "coef";
    case Strategy::VariableReordering: return "reorder";
    case Strategy::Combined: return "combined";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (Strategy k : kAllStrategies) {
    if (s == tag(k) || s == to_string(k)) return k;
  }
  return std::nullopt;
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % n;
  }
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view program, int line, Strategy s) {
  // FNV-1a over a canonical text key.
  const std::string key =
      std::to_string(seed) + "|" + std::string(program) + "|" + std::to_string(line) + "|" + std::string(tag(s));
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

NoOperator::NoOperator(int line) : std::invalid_argument("no arithmetic operator on line " + std::to_string(line)) {}
NoConstant::NoConstant(int line) : std::invalid_argument("no nonzero constant on line " + std::to_string(line)) {}
TooFewVariables::TooFewVariables(int line)
    : std::invalid_argument("fewer than two distinct variables of one type on line " + std::to_string(line)) {}
SourceNotVerified::SourceNotVerified(const std::string& program)
    : std::runtime_error("source program does not verify: " + program) {}

std::vector<std::string> Site::distinct_variables() const {
  std::vector<std::string> out;
  for (const auto& v : variables) {
    if (std::find(out.begin(), out.end(), v.name) == out.end()) out.push_back(v.name);
  }
  return out;
}

namespace {

bool is_arith(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul || op == BinaryOp::Div ||
         op == BinaryOp::Mod;
}

void collect(const Expr& e, int line, Site& site) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::IntLit>) {
          if (e.span.line == line) site.constants.push_back({n.value, e.span});
        } else if constexpr (std::is_same_v<T, lang::VarRef>) {
          if (e.span.line == line) site.variables.push_back({n.name, e.type, e.span});
        } else if constexpr (std::is_same_v<T, lang::Unary>) {
          if (n.op == lang::UnaryOp::Neg && n.op_span.line == line) site.negations.push_back(n.op_span);
          collect(*n.operand, line, site);
        } else if constexpr (std::is_same_v<T, lang::Binary>) {
          collect(*n.lhs, line, site);
          if (is_arith(n.op) && n.op_span.line == line) site.operators.push_back({n.op, n.op_span});
          collect(*n.rhs, line, site);
        }
      },
      e.node);
}

void walk(const lang::Block& b, std::vector<Site>& out);

void walk_stmt(const lang::Stmt& s, std::vector<Site>& out) {
  Site site;
  site.line = s.line;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::VarDecl>) {
          if (n.init) collect(*n.init, s.line, site);
        } else if constexpr (std::is_same_v<T, lang::Assign>) {
          collect(*n.value, s.line, site);
        } else if constexpr (std::is_same_v<T, lang::Return>) {
          for (const auto& v : n.values) collect(*v, s.line, site);
        } else if constexpr (std::is_same_v<T, lang::If>) {
          collect(*n.cond, s.line, site);
        } else if constexpr (std::is_same_v<T, lang::While>) {
          collect(*n.cond, s.line, site);
        }
      },
      s.node);
  auto by_column = [](const auto& a, const auto& b) { return a.span.column < b.span.column; };
  std::sort(site.operators.begin(), site.operators.end(), by_column);
  std::sort(site.constants.begin(), site.constants.end(), by_column);
  std::sort(site.variables.begin(), site.variables.end(), by_column);
  std::sort(site.negations.begin(), site.negations.end(),
            [](const lang::Span& a, const lang::Span& b) { return a.column < b.column; });
  std::set<std::string> int_vars;
  for (const auto& v : site.variables) {
    if (v.type == lang::Type::Int) int_vars.insert(v.name);
  }
  if (!site.operators.empty() || !site.negations.empty() || !site.constants.empty() || int_vars.size() >= 2) {
    out.push_back(std::move(site));
  }

  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::If>) {
          walk(n.then_block, out);
          if (n.else_block) walk(*n.else_block, out);
        } else if constexpr (std::is_same_v<T, lang::While>) {
          walk(n.body, out);
        } else if constexpr (std::is_same_v<T, lang::BlockStmt>) {
          walk(n.block, out);
        }
      },
      s.node);
}

void walk(const lang::Block& b, std::vector<Site>& out) {
  for (const auto& s : b.stmts) walk_stmt(s, out);
}

struct Edit {
  int column = 0;  // 1-based
  int length = 0;
  std::string text;
};

std::string apply_edits(std::string line, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) { return a.column > b.column; });
  for (const auto& e : edits) {
    line.replace(static_cast<std::size_t>(e.column - 1), static_cast<std::size_t>(e.length), e.text);
  }
  return line;
}

Edit edit_at(const lang::Span& span, std::string text) { return Edit{span.column, span.length, std::move(text)}; }

std::optional<std::vector<Edit>> operator_edits(const Site& site, Rng& rng) {
  if (!site.operators.empty()) {
    const auto& tok = site.operators[rng.below(site.operators.size())];
    std::string replacement;
    switch (tok.op) {
      case BinaryOp::Add: replacement = "-"; break;
      case BinaryOp::Sub: replacement = "+"; break;
      case BinaryOp::Mul: replacement = "/"; break;
      case BinaryOp::Div: replacement = rng.below(2) == 0 ? "*" : "%"; break;
      case BinaryOp::Mod: replacement = "/"; break;
      default: return std::nullopt;
    }
    return std::vector<Edit>{edit_at(tok.span, replacement)};
  }
  if (!site.negations.empty()) {
    // No binary operator: flip the sign by dropping a unary minus.
    return std::vector<Edit>{edit_at(site.negations[rng.below(site.negations.size())], "")};
  }
  return std::nullopt;
}

std::optional<std::vector<Edit>> coefficient_edits(const Site& site, const std::string& line_text, Rng& rng) {
  std::vector<const ConstantToken*> candidates;
  for (const auto& c : site.constants) {
    if (c.value != 0) candidates.push_back(&c);
  }
  if (candidates.empty()) return std::nullopt;
  const ConstantToken& tok = *candidates[rng.below(candidates.size())];
  const std::int64_t c = tok.value;
  // [-c, c] without c itself.
  const std::int64_t v = rng.between(-c, c - 1);
  std::string text = std::to_string(v);
  if (v < 0) {
    std::size_t k = static_cast<std::size_t>(tok.span.column - 1);
    while (k > 0 && std::isspace(static_cast<unsigned char>(line_text[k - 1]))) --k;
    if (k > 0 && std::string_view("+-*/%").find(line_text[k - 1]) != std::string_view::npos) text = "(" + text + ")";
  }
  return std::vector<Edit>{edit_at(tok.span, text)};
}

std::optional<std::vector<Edit>> reorder_edits(const Site& site, Rng& rng) {
  std::vector<std::vector<const VariableToken*>> groups;
  for (lang::Type type : {lang::Type::Int, lang::Type::Bool}) {
    std::vector<const VariableToken*> group;
    std::set<std::string> names;
    for (const auto& v : site.variables) {
      if (v.type == type) {
        group.push_back(&v);
        names.insert(v.name);
      }
    }
    if (names.size() >= 2) groups.push_back(std::move(group));
  }
  if (groups.empty()) return std::nullopt;
  const auto& group = groups[rng.below(groups.size())];

  std::vector<std::string> original;
  for (const auto* v : group) original.push_back(v->name);
  std::vector<std::string> shuffled = original;
  do {
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
  } while (shuffled == original);

  std::vector<Edit> edits;
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (shuffled[i] != original[i]) edits.push_back(edit_at(group[i]->span, shuffled[i]));
  }
  return edits;
}

MutationRecord make_record(Strategy s, const Site& site, const std::string& line_text, std::vector<Edit> edits) {
  MutationRecord r;
  r.strategy = s;
  r.line = site.line;
  r.original = line_text;
  r.mutated = apply_edits(line_text, std::move(edits));
  return r;
}

}  // namespace

std::vector<Site> find_sites(const lang::Program& p) {
  std::vector<Site> out;
  for (const auto& m : p.methods) walk(m.body, out);
  std::sort(out.begin(), out.end(), [](const Site& a, const Site& b) { return a.line < b.line; });
  return out;
}

MutationRecord mutate_operator(const Site& site, const std::string& line_text, Rng& rng) {
  auto edits = operator_edits(site, rng);
  if (!edits) throw NoOperator(site.line);
  return make_record(Strategy::OperatorReplacement, site, line_text, std::move(*edits));
}

MutationRecord mutate_coefficient(const Site& site, const std::string& line_text, Rng& rng) {
  auto edits = coefficient_edits(site, line_text, rng);
  if (!edits) throw NoConstant(site.line);
  return make_record(Strategy::CoefficientModification, site, line_text, std::move(*edits));
}

MutationRecord mutate_reorder(const Site& site, const std::string& line_text, Rng& rng) {
  auto edits = reorder_edits(site, rng);
  if (!edits) throw TooFewVariables(site.line);
  return make_record(Strategy::VariableReordering, site, line_text, std::move(*edits));
}

MutationRecord mutate_combined(const Site& site, const std::string& line_text, Rng& rng) {
  auto ops = operator_edits(site, rng);
  auto coefs = coefficient_edits(site, line_text, rng);
  if (!ops && !coefs) throw NoOperator(site.line);
  std::vector<Edit> edits;
  if (ops) edits = std::move(*ops);
  if (coefs) edits.insert(edits.end(), coefs->begin(), coefs->end());
  return make_record(Strategy::Combined, site, line_text, std::move(edits));
}

MutationRecord apply_strategy(Strategy s, const Site& site, const std::string& line_text, Rng& rng) {
  switch (s) {
    case Strategy::OperatorReplacement: return mutate_operator(site, line_text, rng);
    case Strategy::CoefficientModification: return mutate_coefficient(site, line_text, rng);
    case Strategy::VariableReordering: return mutate_reorder(site, line_text, rng);
    case Strategy::Combined: return mutate_combined(site, line_text, rng);
  }
  throw std::invalid_argument("unknown strategy");
}

std::string normalize(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

namespace {

std::string join(const std::vector<std::string>& lines, bool trailing_newline) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || trailing_newline) out += '\n';
  }
  return out;
}

bool verifies(const lang::Program& p, const entail::BackendOptions& backend) {
  return entail::verify_program(p, backend).verified();
}

}  // namespace

GenerationResult generate_bugs(const std::string& program_name, const lang::Program& p,
                               const GenerateOptions& options) {
  if (!verifies(p, options.backend)) throw SourceNotVerified(program_name);

  GenerationResult result;
  std::set<std::pair<int, std::string>> seen;
  for (const Site& site : find_sites(p)) {
    const std::string& text = p.line_text(site.line);
    for (Strategy s : options.strategies) {
      const std::uint64_t seed = derive_seed(options.seed, program_name, site.line, s);
      Rng rng(seed);
      MutationRecord record;
      try {
        record = apply_strategy(s, site, text, rng);
      } catch (const std::invalid_argument&) {
        continue;  // strategy does not apply here
      }
      record.seed = seed;
      if (normalize(record.mutated) == normalize(record.original) ||
          !seen.emplace(site.line, normalize(record.mutated)).second) {
        ++result.discarded;
        continue;
      }

      lang::Program mutant;
      try {
        mutant = lang::replace_line(p, site.line, record.mutated);
        if (verifies(mutant, options.backend)) {
          ++result.discarded;
          continue;
        }
      } catch (const std::exception&) {
        ++result.discarded;
        continue;
      }

      MutatedProgram out;
      out.name = program_name + "_" + std::string(tag(s)) + "_L" + std::to_string(site.line);
      out.unmarked = mutant.source();
      std::vector<std::string> marked = mutant.lines;
      marked[static_cast<std::size_t>(site.line - 1)] += " " + std::string(lang::kMarker);
      out.marked = join(marked, mutant.trailing_newline);
      out.record = std::move(record);
      result.kept.push_back(std::move(out));
    }
  }
  return result;
}

}  // namespace hoarefix::mutate

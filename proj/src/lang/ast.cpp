#include "hoarefix/lang.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

namespace hoarefix::lang {

std::string_view to_string(Type type) { return type == Type::Int ? "int" : "bool"; }

std::string_view symbol(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

std::string_view symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Neq: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Implies: return "==>";
  }
  return "?";
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul ||
         op == BinaryOp::Div || op == BinaryOp::Mod;
}

bool is_comparison(BinaryOp op) {
  return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt ||
         op == BinaryOp::Ge || op == BinaryOp::Eq || op == BinaryOp::Neq;
}

bool is_logical(BinaryOp op) {
  return op == BinaryOp::And || op == BinaryOp::Or || op == BinaryOp::Implies;
}

ExprPtr make_int(std::int64_t value, Span span) {
  return std::make_shared<const Expr>(Expr{IntLit{value}, Type::Int, span});
}

ExprPtr make_bool(bool value, Span span) {
  return std::make_shared<const Expr>(Expr{BoolLit{value}, Type::Bool, span});
}

ExprPtr make_var(std::string name, Type type, Span span) {
  return std::make_shared<const Expr>(Expr{VarRef{std::move(name)}, type, span});
}

namespace {

Span cover(const Span& a, const Span& b) {
  if (a.line == 0) return b;
  if (b.line == 0) return a;
  if (a.line != b.line) return a;  // multi-line: anchor at the start
  const int end = std::max(a.column + a.length, b.column + b.length);
  const int start = std::min(a.column, b.column);
  return Span{a.line, start, end - start};
}

}  // namespace

ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span op_span) {
  const Type want = op == UnaryOp::Neg ? Type::Int : Type::Bool;
  if (operand->type != want) {
    throw std::invalid_argument(std::string("operator '") + std::string(symbol(op)) +
                                "' expects " + std::string(to_string(want)) + " operand");
  }
  const Span span = cover(op_span, operand->span);
  return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand), op_span}, want, span});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span op_span) {
  Type result = Type::Bool;
  auto fail = [&](std::string_view want) {
    throw std::invalid_argument(std::string("operator '") + std::string(symbol(op)) +
                                "' expects " + std::string(want) + " operands");
  };
  if (is_arithmetic(op)) {
    if (lhs->type != Type::Int || rhs->type != Type::Int) fail("int");
    result = Type::Int;
  } else if (op == BinaryOp::Eq || op == BinaryOp::Neq) {
    if (lhs->type != rhs->type) fail("same-typed");
  } else if (is_comparison(op)) {
    if (lhs->type != Type::Int || rhs->type != Type::Int) fail("int");
  } else {
    if (lhs->type != Type::Bool || rhs->type != Type::Bool) fail("bool");
  }
  const Span span = cover(lhs->span, rhs->span);
  return std::make_shared<const Expr>(
      Expr{Binary{op, std::move(lhs), std::move(rhs), op_span}, result, span});
}

bool equivalent(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index() || a.type != b.type) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, VarRef>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          return x.op == y.op && equivalent(*x.operand, *y.operand);
        } else {
          return x.op == y.op && equivalent(*x.lhs, *y.lhs) && equivalent(*x.rhs, *y.rhs);
        }
      },
      a.node);
}

bool equivalent(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equivalent(*a, *b);
}

namespace {

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Implies: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 6;
    default: return 4;  // comparisons
  }
}

constexpr int kUnaryPrecedence = 7;
constexpr int kAtomPrecedence = 8;

int precedence(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) return precedence(b->op);
  if (std::holds_alternative<Unary>(e.node)) return kUnaryPrecedence;
  return kAtomPrecedence;
}

void print(const Expr& e, std::ostream& out);

void print_child(const Expr& child, bool parens, std::ostream& out) {
  if (parens) out << '(';
  print(child, out);
  if (parens) out << ')';
}

void print(const Expr& e, std::ostream& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLit>) {
          out << n.value;
        } else if constexpr (std::is_same_v<T, BoolLit>) {
          out << (n.value ? "true" : "false");
        } else if constexpr (std::is_same_v<T, VarRef>) {
          out << n.name;
        } else if constexpr (std::is_same_v<T, Unary>) {
          out << symbol(n.op);
          const bool nested_neg = n.op == UnaryOp::Neg && std::holds_alternative<Unary>(n.operand->node) &&
                                  std::get<Unary>(n.operand->node).op == UnaryOp::Neg;
          const bool negative_literal = n.op == UnaryOp::Neg && std::holds_alternative<IntLit>(n.operand->node) &&
                                        std::get<IntLit>(n.operand->node).value < 0;
          print_child(*n.operand, precedence(*n.operand) < kUnaryPrecedence || nested_neg || negative_literal,
                      out);
        } else {
          const int p = precedence(n.op);
          const int lp = precedence(*n.lhs);
          const int rp = precedence(*n.rhs);
          const bool right_assoc = n.op == BinaryOp::Implies;
          const bool non_assoc = is_comparison(n.op);
          // && and || share a level in Dafny and may not be mixed bare.
          auto mixes_logic = [&](const Expr& c) {
            const auto* b = std::get_if<Binary>(&c.node);
            return b && ((n.op == BinaryOp::And && b->op == BinaryOp::Or) ||
                         (n.op == BinaryOp::Or && b->op == BinaryOp::And));
          };
          const bool lparen = lp < p || (lp == p && (right_assoc || non_assoc)) || mixes_logic(*n.lhs);
          const bool rparen = rp < p || (rp == p && !right_assoc) || mixes_logic(*n.rhs);
          print_child(*n.lhs, lparen, out);
          out << ' ' << symbol(n.op) << ' ';
          print_child(*n.rhs, rparen, out);
        }
      },
      e.node);
}

void collect_vars(const Expr& e, std::vector<std::string>& out, std::unordered_set<std::string>& seen) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarRef>) {
          if (seen.insert(n.name).second) out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, Unary>) {
          collect_vars(*n.operand, out, seen);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_vars(*n.lhs, out, seen);
          collect_vars(*n.rhs, out, seen);
        }
      },
      e.node);
}

}  // namespace

std::string to_string(const Expr& expr) {
  std::ostringstream out;
  print(expr, out);
  return out.str();
}

std::string to_string(const ExprPtr& expr) { return expr ? to_string(*expr) : std::string{}; }

std::vector<std::string> free_variables(const Expr& expr) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  collect_vars(expr, out, seen);
  return out;
}

// Method / Program helpers ---------------------------------------------------

namespace {

const Stmt* find_stmt(const Block& block, int line) {
  for (const auto& s : block.stmts) {
    if (s.line == line && !std::holds_alternative<BlockStmt>(s.node)) return &s;
    const Stmt* inner = std::visit(
        [&](const auto& n) -> const Stmt* {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, If>) {
            if (const Stmt* r = find_stmt(n.then_block, line)) return r;
            if (n.else_block) return find_stmt(*n.else_block, line);
          } else if constexpr (std::is_same_v<T, While>) {
            return find_stmt(n.body, line);
          } else if constexpr (std::is_same_v<T, BlockStmt>) {
            return find_stmt(n.block, line);
          }
          return nullptr;
        },
        s.node);
    if (inner) return inner;
  }
  return nullptr;
}

void collect_lines(const Block& block, std::vector<int>& out) {
  for (const auto& s : block.stmts) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, BlockStmt>) {
            collect_lines(n.block, out);
          } else {
            out.push_back(s.line);
            if constexpr (std::is_same_v<T, If>) {
              collect_lines(n.then_block, out);
              if (n.else_block) collect_lines(*n.else_block, out);
            } else if constexpr (std::is_same_v<T, While>) {
              collect_lines(n.body, out);
            }
          }
        },
        s.node);
  }
}

bool equivalent_block(const Block& a, const Block& b);

bool equivalent_clauses(const std::vector<Clause>& a, const std::vector<Clause>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].line != b[i].line || !equivalent(a[i].expr, b[i].expr)) return false;
  }
  return true;
}

bool equivalent_stmt(const Stmt& a, const Stmt& b) {
  if (a.line != b.line || a.marked != b.marked || a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, VarDecl>) {
          return x.name == y.name && x.type == y.type && equivalent(x.init, y.init);
        } else if constexpr (std::is_same_v<T, Assign>) {
          return x.target == y.target && equivalent(x.value, y.value);
        } else if constexpr (std::is_same_v<T, If>) {
          if (!equivalent(x.cond, y.cond) || !equivalent_block(x.then_block, y.then_block)) return false;
          if (x.else_block.has_value() != y.else_block.has_value() || x.else_is_if != y.else_is_if) return false;
          return !x.else_block || equivalent_block(*x.else_block, *y.else_block);
        } else if constexpr (std::is_same_v<T, While>) {
          if (!equivalent(x.cond, y.cond) || !equivalent_clauses(x.invariants, y.invariants)) return false;
          if (x.decreases.has_value() != y.decreases.has_value()) return false;
          if (x.decreases && !equivalent(x.decreases->expr, y.decreases->expr)) return false;
          return equivalent_block(x.body, y.body);
        } else if constexpr (std::is_same_v<T, Return>) {
          if (x.values.size() != y.values.size()) return false;
          for (std::size_t i = 0; i < x.values.size(); ++i) {
            if (!equivalent(x.values[i], y.values[i])) return false;
          }
          return true;
        } else {
          return equivalent_block(x.block, y.block);
        }
      },
      a.node);
}

bool equivalent_block(const Block& a, const Block& b) {
  if (a.stmts.size() != b.stmts.size()) return false;
  for (std::size_t i = 0; i < a.stmts.size(); ++i) {
    if (!equivalent_stmt(a.stmts[i], b.stmts[i])) return false;
  }
  return true;
}

bool same_params(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
  }
  return true;
}

}  // namespace

std::optional<Type> Method::type_of(std::string_view var) const {
  for (const auto& p : params) {
    if (p.name == var) return p.type;
  }
  for (const auto& r : returns) {
    if (r.name == var) return r.type;
  }
  return std::nullopt;
}

std::vector<int> Method::statement_lines() const {
  std::vector<int> out;
  collect_lines(body, out);
  std::sort(out.begin(), out.end());
  return out;
}

const Stmt* Method::statement_at(int l) const { return find_stmt(body, l); }

std::string Program::source() const {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || trailing_newline) out += '\n';
  }
  return out;
}

const std::string& Program::line_text(int line) const {
  if (line < 1 || static_cast<std::size_t>(line) > lines.size()) {
    throw std::out_of_range("line " + std::to_string(line) + " out of range");
  }
  return lines[static_cast<std::size_t>(line - 1)];
}

const Method* Program::method_at(int line) const {
  for (const auto& m : methods) {
    if (line >= m.first_line() && line <= m.last_line()) return &m;
  }
  return nullptr;
}

const Method* Program::find_method(std::string_view name) const {
  for (const auto& m : methods) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

bool Program::is_statement_line(int line) const {
  const Method* m = method_at(line);
  return m != nullptr && m->statement_at(line) != nullptr;
}

std::vector<int> Program::marked_lines() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto pos = lines[i].find("//");
    if (pos != std::string::npos && is_marker_comment(std::string_view(lines[i]).substr(pos))) {
      out.push_back(static_cast<int>(i) + 1);
    }
  }
  return out;
}

bool equivalent(const Program& a, const Program& b) {
  if (a.methods.size() != b.methods.size()) return false;
  for (std::size_t i = 0; i < a.methods.size(); ++i) {
    const Method& x = a.methods[i];
    const Method& y = b.methods[i];
    if (x.name != y.name || x.line != y.line || !same_params(x.params, y.params) ||
        !same_params(x.returns, y.returns) || !equivalent_clauses(x.preconditions, y.preconditions) ||
        !equivalent_clauses(x.postconditions, y.postconditions) || !equivalent_block(x.body, y.body)) {
      return false;
    }
  }
  return true;
}

bool operator==(const Program& a, const Program& b) {
  return a.lines == b.lines && a.trailing_newline == b.trailing_newline && equivalent(a, b);
}

// Errors -------------------------------------------------------------------

SyntaxError::SyntaxError(int line, int column, std::string expected)
    : LangError(line, column,
                std::to_string(line) + ":" + std::to_string(column) + ": syntax error: expected " + expected),
      expected_(std::move(expected)) {}

TypeError::TypeError(int line, const std::string& message)
    : LangError(line, 0, std::to_string(line) + ": type error: " + message) {}

UnsupportedConstruct::UnsupportedConstruct(int line, std::string construct)
    : LangError(line, 0, std::to_string(line) + ": unsupported construct: " + construct),
      construct_(std::move(construct)) {}

NotAStatementLine::NotAStatementLine(int line)
    : std::runtime_error("line " + std::to_string(line) + " does not hold a statement"), line_(line) {}

ReparseFailed::ReparseFailed(int line, const LangError& cause)
    : std::runtime_error("patched line " + std::to_string(line) + " does not parse: " + cause.what()),
      line_(line),
      cause_(cause.what()) {}

bool is_marker_comment(std::string_view comment) {
  if (comment.substr(0, 2) == "//") comment.remove_prefix(2);
  while (!comment.empty() && (comment.front() == ' ' || comment.front() == '\t')) comment.remove_prefix(1);
  return comment.substr(0, 10) == "buggy line";
}

std::string strip_marker(std::string_view line) {
  std::size_t pos = 0;
  while ((pos = line.find("//", pos)) != std::string_view::npos) {
    if (is_marker_comment(line.substr(pos))) {
      std::string_view head = line.substr(0, pos);
      while (!head.empty() && (head.back() == ' ' || head.back() == '\t')) head.remove_suffix(1);
      return std::string(head);
    }
    pos += 2;
  }
  return std::string(line);
}

}  // namespace hoarefix::lang

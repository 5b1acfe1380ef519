#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hoarefix::lang {

enum class Type { Int, Bool };

std::string_view to_string(Type type);

/// 1-based line and column, length in bytes.
struct Span {
  int line = 0;
  int column = 0;
  int length = 0;
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp {
  Add, Sub, Mul, Div, Mod,
  Lt, Le, Gt, Ge, Eq, Neq,
  And, Or, Implies,
};

std::string_view symbol(UnaryOp op);
std::string_view symbol(BinaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_comparison(BinaryOp op);
bool is_logical(BinaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct IntLit {
  std::int64_t value;
};
struct BoolLit {
  bool value;
};
struct VarRef {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
  Span op_span;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
  Span op_span;
};

/// Immutable expression node. Trees are shared freely between analyses.
struct Expr {
  std::variant<IntLit, BoolLit, VarRef, Unary, Binary> node;
  Type type = Type::Int;
  Span span;
};

ExprPtr make_int(std::int64_t value, Span span = {});
ExprPtr make_bool(bool value, Span span = {});
ExprPtr make_var(std::string name, Type type, Span span = {});
/// Throws std::invalid_argument on operand type mismatch.
ExprPtr make_unary(UnaryOp op, ExprPtr operand, Span op_span = {});
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs, Span op_span = {});

/// Structural equality ignoring spans.
bool equivalent(const Expr& a, const Expr& b);
bool equivalent(const ExprPtr& a, const ExprPtr& b);

/// Minimal-parenthesis rendering; re-parses to an equivalent tree.
std::string to_string(const Expr& expr);
std::string to_string(const ExprPtr& expr);

/// Variable names in first-occurrence order (left to right).
std::vector<std::string> free_variables(const Expr& expr);

struct Clause {
  ExprPtr expr;
  int line = 0;
};

struct Stmt;

struct Block {
  std::vector<Stmt> stmts;
  int open_line = 0;
  int close_line = 0;
};

struct VarDecl {
  std::string name;
  Type type = Type::Int;
  ExprPtr init;  // null when declared without initializer
};

struct Assign {
  std::string target;
  ExprPtr value;
  Span target_span;
};

struct If {
  ExprPtr cond;
  Block then_block;
  std::optional<Block> else_block;
  int else_line = 0;
  bool else_is_if = false;  // `else if`: else_block holds exactly one If
};

struct While {
  ExprPtr cond;
  std::vector<Clause> invariants;
  std::optional<Clause> decreases;
  Block body;
};

struct Return {
  std::vector<ExprPtr> values;  // empty for a bare `return;`
};

struct BlockStmt {
  Block block;
};

struct Stmt {
  std::variant<VarDecl, Assign, If, While, Return, BlockStmt> node;
  int line = 0;
  bool marked = false;  // trailing `//buggy line`
};

struct Param {
  std::string name;
  Type type = Type::Int;
};

struct Method {
  std::string name;
  std::vector<Param> params;
  std::vector<Param> returns;
  std::vector<Clause> preconditions;
  std::vector<Clause> postconditions;
  Block body;
  int line = 0;

  std::optional<Type> type_of(std::string_view var) const;
  /// Lines holding a VarDecl/Assign/If/While/Return, ascending.
  std::vector<int> statement_lines() const;
  const Stmt* statement_at(int line) const;
  int first_line() const { return line; }
  int last_line() const { return body.close_line; }
};

struct Program {
  std::vector<Method> methods;
  std::vector<std::string> lines;  // raw source, without line terminators
  bool trailing_newline = true;

  std::string source() const;
  /// 1-based. Throws std::out_of_range.
  const std::string& line_text(int line) const;
  const Method* method_at(int line) const;
  const Method* find_method(std::string_view name) const;
  bool is_statement_line(int line) const;
  std::vector<int> marked_lines() const;
};

/// Structural equality of every method, ignoring expression spans.
bool equivalent(const Program& a, const Program& b);
bool operator==(const Program& a, const Program& b);

// Errors -------------------------------------------------------------------

class LangError : public std::runtime_error {
 public:
  LangError(int line, int column, const std::string& what)
      : std::runtime_error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SyntaxError : public LangError {
 public:
  SyntaxError(int line, int column, std::string expected);
  const std::string& expected() const { return expected_; }

 private:
  std::string expected_;
};

class TypeError : public LangError {
 public:
  TypeError(int line, const std::string& message);
};

class UnsupportedConstruct : public LangError {
 public:
  UnsupportedConstruct(int line, std::string construct);
  const std::string& construct() const { return construct_; }

 private:
  std::string construct_;
};

class NotAStatementLine : public std::runtime_error {
 public:
  explicit NotAStatementLine(int line);
  int line() const { return line_; }

 private:
  int line_;
};

class ReparseFailed : public std::runtime_error {
 public:
  ReparseFailed(int line, const LangError& cause);
  int line() const { return line_; }
  const std::string& cause() const { return cause_; }

 private:
  int line_;
  std::string cause_;
};

// Operations ---------------------------------------------------------------

Program parse_program(std::string_view source);

/// Parses a standalone boolean or integer expression against the given
/// variable typing. Used by tools and tests.
ExprPtr parse_expression(std::string_view text, const std::vector<Param>& scope);

/// Canonical rendering. Every element keeps its source line, so the
/// statement line map of the result is identical to the input.
std::string format_program(const Program& program);

/// Replaces one statement line and re-parses. A candidate without leading
/// whitespace inherits the indentation of the line it replaces.
Program replace_line(const Program& program, int line, std::string_view new_text);

/// True when the comment text is the fault marker.
bool is_marker_comment(std::string_view comment);
inline constexpr std::string_view kMarker = "//buggy line";

/// Removes a trailing `//buggy line` comment (and whitespace before it).
std::string strip_marker(std::string_view line);

}  // namespace hoarefix::lang

#include <charconv>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "hoarefix/lang.hpp"
#include "hoarefix/lexer.hpp"

namespace hoarefix::lang {

namespace {

const std::unordered_set<std::string> kUnsupportedKeywords = {
    "ghost",    "class",  "trait",    "datatype", "codatatype", "module",   "import",  "function",
    "predicate", "lemma", "constructor", "iterator", "type",     "const",    "static",  "twostate",
    "assert",   "assume", "print",    "forall",   "exists",     "calc",     "break",   "continue",
    "match",    "case",   "new",      "modifies", "reads",      "label",    "yield",   "old",
    "fresh",    "unchanged", "expect", "array",   "seq",        "set",      "multiset", "map",
    "iset",     "imap",   "nat",      "real",     "string",     "char",     "object",  "this",
    "null",     "opaque", "reveal",   "allocated", "include",   "abstract", "refines", "extends",
};

const std::unordered_set<std::string> kReserved = {
    "method", "returns", "requires", "ensures", "var", "if", "else", "while", "invariant",
    "decreases", "return", "true", "false", "int", "bool",
};

class Parser {
 public:
  explicit Parser(std::string_view source) : lex_(tokenize(source)) {
    for (const auto& c : lex_.comments) {
      if (is_marker_comment(c.text)) marked_.insert(c.line);
    }
  }

  std::vector<Method> parse_methods() {
    std::vector<Method> out;
    std::set<std::string> names;
    while (peek().kind != TokenKind::End) {
      const Token& t = peek();
      if (t.is("method")) {
        Method m = parse_method();
        if (!names.insert(m.name).second) throw TypeError(m.line, "duplicate method '" + m.name + "'");
        out.push_back(std::move(m));
        continue;
      }
      unsupported_or_syntax(t, "'method'");
    }
    return out;
  }

  ExprPtr parse_standalone(const std::vector<Param>& scope) {
    scopes_.emplace_back();
    for (const auto& p : scope) scopes_.back()[p.name] = p.type;
    ExprPtr e = parse_expr();
    if (peek().kind != TokenKind::End) throw SyntaxError(peek().line, peek().column, "end of expression");
    return e;
  }

 private:
  // Token cursor -------------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = std::min(pos_ + ahead, lex_.tokens.size() - 1);
    return lex_.tokens[k];
  }

  Token next() {
    Token t = peek();
    if (pos_ < lex_.tokens.size() - 1) ++pos_;
    return t;
  }

  bool accept(std::string_view s) {
    if (peek().is(s)) {
      ++pos_;
      return true;
    }
    return false;
  }

  Token expect(std::string_view s) {
    if (!peek().is(s)) {
      unsupported_or_syntax(peek(), "'" + std::string(s) + "'");
    }
    return next();
  }

  [[noreturn]] void unsupported_or_syntax(const Token& t, const std::string& expected) const {
    if (t.kind == TokenKind::Identifier && kUnsupportedKeywords.count(t.text)) {
      throw UnsupportedConstruct(t.line, t.text);
    }
    if (t.kind == TokenKind::Punct && (t.text == "[" || t.text == "]")) {
      throw UnsupportedConstruct(t.line, "sequence/array indexing");
    }
    if (t.kind == TokenKind::Punct && t.text == "|") throw UnsupportedConstruct(t.line, "sequence cardinality");
    if (t.kind == TokenKind::Punct && t.text == ".") throw UnsupportedConstruct(t.line, "member access");
    if (t.kind == TokenKind::Punct && t.text == "<==>") throw UnsupportedConstruct(t.line, "equivalence '<==>'");
    throw SyntaxError(t.line, t.column, expected);
  }

  std::string expect_identifier(const std::string& what) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || kReserved.count(t.text)) unsupported_or_syntax(t, what);
    if (kUnsupportedKeywords.count(t.text)) throw UnsupportedConstruct(t.line, t.text);
    return next().text;
  }

  Type parse_type() {
    const Token& t = peek();
    if (t.is("int")) {
      next();
      return Type::Int;
    }
    if (t.is("bool")) {
      next();
      return Type::Bool;
    }
    if (t.kind == TokenKind::Identifier) throw UnsupportedConstruct(t.line, "type '" + t.text + "'");
    throw SyntaxError(t.line, t.column, "a type");
  }

  // Scopes -------------------------------------------------------------------

  std::optional<Type> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }

  void declare(const std::string& name, Type type, int line) {
    if (!method_names_.insert(name).second) {
      throw TypeError(line, "'" + name + "' is already declared in this method");
    }
    scopes_.back()[name] = type;
  }

  // Methods --------------------------------------------------------------------

  std::vector<Param> parse_params(int line) {
    std::vector<Param> out;
    expect("(");
    if (accept(")")) return out;
    do {
      if (peek().is("ghost")) throw UnsupportedConstruct(peek().line, "ghost");
      Param p;
      p.name = expect_identifier("parameter name");
      expect(":");
      p.type = parse_type();
      declare(p.name, p.type, line);
      out.push_back(std::move(p));
    } while (accept(","));
    expect(")");
    return out;
  }

  Method parse_method() {
    Method m;
    const Token kw = expect("method");
    m.line = kw.line;
    if (peek().is("{")) throw UnsupportedConstruct(peek().line, "method attributes");
    m.name = expect_identifier("method name");
    method_names_.clear();
    params_.clear();
    scopes_.clear();
    last_stmt_line_ = 0;

    scopes_.emplace_back();
    m.params = parse_params(m.line);
    for (const auto& p : m.params) params_.insert(p.name);
    if (accept("returns")) {
      scopes_.emplace_back();
      m.returns = parse_params(m.line);
      returns_scope_ = scopes_.back();
      scopes_.pop_back();
    } else {
      returns_scope_.clear();
    }
    returns_ = m.returns;

    while (true) {
      const Token& t = peek();
      if (t.is("requires")) {
        next();
        Clause c{parse_bool_expr("requires clause"), t.line};
        m.preconditions.push_back(std::move(c));
      } else if (t.is("ensures")) {
        const int line = t.line;
        next();
        scopes_.push_back(returns_scope_);
        ExprPtr e = parse_bool_expr("ensures clause");
        scopes_.pop_back();
        m.postconditions.push_back(Clause{std::move(e), line});
      } else if (t.is("decreases")) {
        next();
        scopes_.push_back(returns_scope_);
        parse_expr();
        scopes_.pop_back();
      } else {
        break;
      }
    }

    scopes_.push_back(returns_scope_);
    m.body = parse_block();
    scopes_.clear();
    return m;
  }

  // Statements ----------------------------------------------------------------

  Block parse_block() {
    Block b;
    b.open_line = expect("{").line;
    scopes_.emplace_back();
    while (!peek().is("}")) {
      if (peek().kind == TokenKind::End) throw SyntaxError(peek().line, peek().column, "'}'");
      b.stmts.push_back(parse_stmt());
    }
    b.close_line = next().line;
    scopes_.pop_back();
    return b;
  }

  void begin_statement(const Token& t) {
    if (t.line == last_stmt_line_) {
      throw SyntaxError(t.line, t.column, "one statement per line");
    }
    last_stmt_line_ = t.line;
  }

  Stmt make_stmt(int line) {
    Stmt s;
    s.line = line;
    s.marked = marked_.count(line) > 0;
    return s;
  }

  Stmt parse_stmt() {
    const Token t = peek();
    if (t.is("{")) {
      Stmt s = make_stmt(t.line);
      s.node = BlockStmt{parse_block()};
      return s;
    }
    begin_statement(t);
    Stmt s = make_stmt(t.line);

    if (t.is("var")) {
      next();
      if (peek().is("ghost")) throw UnsupportedConstruct(t.line, "ghost");
      VarDecl d;
      d.name = expect_identifier("variable name");
      if (peek().is(",")) throw UnsupportedConstruct(t.line, "multiple declaration");
      std::optional<Type> declared;
      if (accept(":")) declared = parse_type();
      if (accept(":=")) {
        d.init = parse_expr();
        if (declared && *declared != d.init->type) {
          throw TypeError(t.line, "initializer of '" + d.name + "' has type " + std::string(to_string(d.init->type)));
        }
        d.type = d.init->type;
      } else if (declared) {
        d.type = *declared;
      } else {
        throw SyntaxError(peek().line, peek().column, "':' or ':='");
      }
      expect(";");
      declare(d.name, d.type, t.line);
      s.node = std::move(d);
      return s;
    }

    if (t.is("return")) {
      next();
      Return r;
      if (!peek().is(";")) {
        do {
          r.values.push_back(parse_expr());
        } while (accept(","));
      }
      expect(";");
      if (!r.values.empty()) {
        if (r.values.size() != returns_.size()) {
          throw TypeError(t.line, "return expects " + std::to_string(returns_.size()) + " value(s)");
        }
        for (std::size_t k = 0; k < r.values.size(); ++k) {
          if (r.values[k]->type != returns_[k].type) {
            throw TypeError(t.line, "return value for '" + returns_[k].name + "' has wrong type");
          }
        }
      }
      s.node = std::move(r);
      return s;
    }

    if (t.is("if")) {
      next();
      s.node = parse_if_rest();
      return s;
    }

    if (t.is("while")) {
      next();
      While w;
      w.cond = parse_bool_expr("loop guard");
      while (true) {
        const Token& c = peek();
        if (c.is("invariant")) {
          next();
          w.invariants.push_back(Clause{parse_bool_expr("invariant"), c.line});
        } else if (c.is("decreases")) {
          next();
          w.decreases = Clause{parse_expr(), c.line};
        } else if (c.is("modifies")) {
          throw UnsupportedConstruct(c.line, "modifies");
        } else {
          break;
        }
      }
      w.body = parse_block();
      s.node = std::move(w);
      return s;
    }

    if (t.kind == TokenKind::Identifier && !kReserved.count(t.text) && !kUnsupportedKeywords.count(t.text)) {
      if (peek(1).is(",")) throw UnsupportedConstruct(t.line, "simultaneous assignment");
      if (peek(1).is("(")) throw UnsupportedConstruct(t.line, "method call");
      if (peek(1).is("[") || peek(1).is(".")) throw UnsupportedConstruct(t.line, "heap update");
      Assign a;
      const Token target = next();
      a.target = target.text;
      a.target_span = Span{target.line, target.column, static_cast<int>(target.text.size())};
      const auto type = lookup(a.target);
      if (!type) throw TypeError(t.line, "undeclared identifier '" + a.target + "'");
      if (params_.count(a.target)) {
        throw TypeError(t.line, "cannot assign to parameter '" + a.target + "'");
      }
      expect(":=");
      a.value = parse_expr();
      if (a.value->type != *type) throw TypeError(t.line, "assignment to '" + a.target + "' has wrong type");
      expect(";");
      s.node = std::move(a);
      return s;
    }

    unsupported_or_syntax(t, "a statement");
  }

  If parse_if_rest() {
    If node;
    node.cond = parse_bool_expr("if guard");
    node.then_block = parse_block();
    if (peek().is("else")) {
      node.else_line = next().line;
      if (peek().is("if")) {
        const Token t = peek();
        begin_statement(t);
        next();
        Stmt inner = make_stmt(t.line);
        inner.node = parse_if_rest();
        Block b;
        b.open_line = t.line;
        b.close_line = last_close_line(std::get<If>(inner.node));
        b.stmts.push_back(std::move(inner));
        node.else_block = std::move(b);
        node.else_is_if = true;
      } else {
        node.else_block = parse_block();
      }
    }
    return node;
  }

  static int last_close_line(const If& n) {
    if (n.else_block) return n.else_block->close_line;
    return n.then_block.close_line;
  }

  // Expressions ---------------------------------------------------------------

  ExprPtr parse_bool_expr(const std::string& what) {
    const Token& t = peek();
    ExprPtr e = parse_expr();
    if (e->type != Type::Bool) throw TypeError(t.line, what + " must be boolean");
    return e;
  }

  ExprPtr binary(BinaryOp op, ExprPtr l, ExprPtr r, const Token& at) {
    try {
      return make_binary(op, std::move(l), std::move(r), Span{at.line, at.column, static_cast<int>(at.text.size())});
    } catch (const std::invalid_argument& e) {
      throw TypeError(at.line, e.what());
    }
  }

  ExprPtr parse_expr() { return parse_implies(); }

  ExprPtr parse_implies() {
    ExprPtr lhs = parse_or();
    if (peek().is("==>")) {
      const Token op = next();
      ExprPtr rhs = parse_implies();
      return binary(BinaryOp::Implies, std::move(lhs), std::move(rhs), op);
    }
    if (peek().is("<==")) throw UnsupportedConstruct(peek().line, "reverse implication '<=='");
    return lhs;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek().is("||")) {
      const Token op = next();
      lhs = binary(BinaryOp::Or, std::move(lhs), parse_and(), op);
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_comparison();
    while (peek().is("&&")) {
      const Token op = next();
      lhs = binary(BinaryOp::And, std::move(lhs), parse_comparison(), op);
    }
    return lhs;
  }

  static std::optional<BinaryOp> comparison_op(const Token& t) {
    if (t.kind != TokenKind::Punct) return std::nullopt;
    if (t.text == "<") return BinaryOp::Lt;
    if (t.text == "<=") return BinaryOp::Le;
    if (t.text == ">") return BinaryOp::Gt;
    if (t.text == ">=") return BinaryOp::Ge;
    if (t.text == "==") return BinaryOp::Eq;
    if (t.text == "!=") return BinaryOp::Neq;
    return std::nullopt;
  }

  // Chains `a < b <= c` desugar to `a < b && b <= c`.
  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_additive();
    ExprPtr result;
    while (auto op = comparison_op(peek())) {
      const Token tok = next();
      ExprPtr rhs = parse_additive();
      ExprPtr link = binary(*op, lhs, rhs, tok);
      result = result ? binary(BinaryOp::And, result, link, tok) : link;
      lhs = rhs;
    }
    return result ? result : lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (peek().is("+") || peek().is("-")) {
      const Token op = next();
      lhs = binary(op.text == "+" ? BinaryOp::Add : BinaryOp::Sub, std::move(lhs), parse_multiplicative(), op);
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_unary();
    while (peek().is("*") || peek().is("/") || peek().is("%")) {
      const Token op = next();
      const BinaryOp k = op.text == "*" ? BinaryOp::Mul : op.text == "/" ? BinaryOp::Div : BinaryOp::Mod;
      lhs = binary(k, std::move(lhs), parse_unary(), op);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (peek().is("-") || peek().is("!")) {
      const Token op = next();
      ExprPtr operand = parse_unary();
      try {
        return make_unary(op.text == "-" ? UnaryOp::Neg : UnaryOp::Not, std::move(operand),
                          Span{op.line, op.column, 1});
      } catch (const std::invalid_argument& e) {
        throw TypeError(op.line, e.what());
      }
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token t = peek();
    const Span span{t.line, t.column, static_cast<int>(t.text.size())};
    if (t.kind == TokenKind::Integer) {
      next();
      std::string digits;
      for (char c : t.text) {
        if (c != '_') digits += c;
      }
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec != std::errc{} || p != digits.data() + digits.size()) {
        throw SyntaxError(t.line, t.column, "integer literal within 64-bit range");
      }
      return make_int(v, span);
    }
    if (t.is("true") || t.is("false")) {
      next();
      return make_bool(t.text == "true", span);
    }
    if (t.is("(")) {
      next();
      ExprPtr e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind == TokenKind::Identifier && !kReserved.count(t.text)) {
      if (kUnsupportedKeywords.count(t.text)) throw UnsupportedConstruct(t.line, t.text);
      next();
      if (peek().is("(")) throw UnsupportedConstruct(t.line, "call to '" + t.text + "'");
      if (peek().is("[")) throw UnsupportedConstruct(t.line, "sequence/array indexing");
      if (peek().is(".")) throw UnsupportedConstruct(t.line, "member access");
      const auto type = lookup(t.text);
      if (!type) throw TypeError(t.line, "undeclared identifier '" + t.text + "'");
      return make_var(t.text, *type, span);
    }
    unsupported_or_syntax(t, "an expression");
  }

  LexResult lex_;
  std::size_t pos_ = 0;
  std::set<int> marked_;
  std::vector<std::unordered_map<std::string, Type>> scopes_;
  std::unordered_map<std::string, Type> returns_scope_;
  std::unordered_set<std::string> method_names_;
  std::unordered_set<std::string> params_;
  std::vector<Param> returns_;
  int last_stmt_line_ = 0;
};

std::vector<std::string> split_lines(std::string_view source, bool& trailing_newline) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < source.size()) {
    const std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) {
      lines.emplace_back(source.substr(start));
      trailing_newline = false;
      return lines;
    }
    std::string l(source.substr(start, end - start));
    if (!l.empty() && l.back() == '\r') l.pop_back();
    lines.push_back(std::move(l));
    start = end + 1;
  }
  trailing_newline = true;
  return lines;
}

}  // namespace

Program parse_program(std::string_view source) {
  Program p;
  p.lines = split_lines(source, p.trailing_newline);
  Parser parser(source);
  p.methods = parser.parse_methods();
  return p;
}

ExprPtr parse_expression(std::string_view text, const std::vector<Param>& scope) {
  Parser parser(text);
  return parser.parse_standalone(scope);
}

Program replace_line(const Program& program, int line, std::string_view new_text) {
  if (!program.is_statement_line(line)) throw NotAStatementLine(line);
  Program copy;
  copy.lines = program.lines;
  copy.trailing_newline = program.trailing_newline;
  std::string& target = copy.lines[static_cast<std::size_t>(line - 1)];
  std::string replacement(new_text);
  while (!replacement.empty() && (replacement.back() == '\n' || replacement.back() == '\r')) replacement.pop_back();
  if (replacement.find('\n') != std::string::npos) {
    throw ReparseFailed(line, SyntaxError(line, 1, "a single-line replacement"));
  }
  if (replacement.empty() || (replacement.front() != ' ' && replacement.front() != '\t')) {
    const std::size_t indent = target.find_first_not_of(" \t");
    replacement = target.substr(0, indent == std::string::npos ? target.size() : indent) + replacement;
  }
  target = std::move(replacement);
  try {
    Program reparsed = parse_program(copy.source());
    return reparsed;
  } catch (const LangError& e) {
    throw ReparseFailed(line, e);
  }
}

}  // namespace hoarefix::lang

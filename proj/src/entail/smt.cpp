#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hoarefix/entail.hpp"

namespace hoarefix::entail {

using lang::BinaryOp;
using lang::Expr;

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Valid: return "valid";
    case Status::Invalid: return "invalid";
    case Status::Unknown: return "unknown";
    case Status::Timeout: return "timeout";
  }
  return "?";
}

SolverNotFound::SolverNotFound(const std::string& executable)
    : std::runtime_error("solver executable not found: " + executable) {}

SolverProtocolError::SolverProtocolError(std::string raw)
    : std::runtime_error("unexpected solver output: " + raw.substr(0, 200)), raw_(std::move(raw)) {}

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> words = {
      "abs",    "and",     "as",       "assert",     "bool",    "check-sat", "declare-const", "declare-fun",
      "define-fun", "distinct", "div",  "exists",     "false",   "forall",    "get-model",     "int",
      "is_int", "ite",     "let",      "match",      "mod",     "not",       "or",            "par",
      "real",   "rem",     "to_int",   "to_real",    "true",    "xor",       "Bool",          "Int",
      "Real",   "_",       "!",        "NUMERAL",    "DECIMAL", "STRING",    "model",         "push",
      "pop",    "exit",    "echo",     "set-option", "set-logic",
  };
  return words;
}

bool plain_symbol(const std::string& name) {
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0]))) return false;
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return !reserved_words().count(name);
}

/// Reserved words get a `!` suffix so they can never be confused with a
/// builtin, even inside bars.
std::string smt_symbol(const std::string& name) {
  if (plain_symbol(name)) return name;
  if (reserved_words().count(name)) return "|" + name + "!|";
  return "|" + name + "|";
}

std::string source_symbol(std::string s) {
  if (s.size() >= 2 && s.front() == '|' && s.back() == '|') s = s.substr(1, s.size() - 2);
  if (!s.empty() && s.back() == '!' && reserved_words().count(s.substr(0, s.size() - 1))) s.pop_back();
  return s;
}

std::string smt_op(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "div";
    case BinaryOp::Mod: return "mod";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Neq: return "distinct";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
    case BinaryOp::Implies: return "=>";
  }
  return "?";
}

std::string term(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::IntLit>) {
          return n.value < 0 ? "(- " + std::to_string(-n.value) + ")" : std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, lang::BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, lang::VarRef>) {
          return smt_symbol(n.name);
        } else if constexpr (std::is_same_v<T, lang::Unary>) {
          return std::string(n.op == lang::UnaryOp::Neg ? "(- " : "(not ") + term(*n.operand) + ")";
        } else {
          return "(" + smt_op(n.op) + " " + term(*n.lhs) + " " + term(*n.rhs) + ")";
        }
      },
      e.node);
}

void collect_divisors(const Expr& e, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (const auto* u = std::get_if<lang::Unary>(&e.node)) {
    collect_divisors(*u->operand, out, seen);
  } else if (const auto* b = std::get_if<lang::Binary>(&e.node)) {
    collect_divisors(*b->lhs, out, seen);
    collect_divisors(*b->rhs, out, seen);
    if (b->op == BinaryOp::Div || b->op == BinaryOp::Mod) {
      std::string d = term(*b->rhs);
      if (seen.insert(d).second) out.push_back(std::move(d));
    }
  }
}

// S-expressions, just enough for `(model ...)` / `((define-fun ...))` output.
struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(std::string_view text) : text_(text) {}

  std::optional<SExpr> next() {
    skip();
    if (pos_ >= text_.size()) return std::nullopt;
    return read();
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw SolverProtocolError(std::string(text_));
    SExpr out;
    if (text_[pos_] == '(') {
      out.is_list = true;
      ++pos_;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw SolverProtocolError(std::string(text_));
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        out.items.push_back(read());
      }
      return out;
    }
    if (text_[pos_] == ')') throw SolverProtocolError(std::string(text_));
    const std::size_t start = pos_;
    if (text_[pos_] == '|') {
      const std::size_t end = text_.find('|', pos_ + 1);
      if (end == std::string_view::npos) throw SolverProtocolError(std::string(text_));
      pos_ = end + 1;
    } else if (text_[pos_] == '"') {
      ++pos_;
      while (pos_ < text_.size()) {
        if (text_[pos_] == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            pos_ += 2;
            continue;
          }
          ++pos_;
          break;
        }
        ++pos_;
      }
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
             text_[pos_] != ')') {
        ++pos_;
      }
    }
    out.atom = std::string(text_.substr(start, pos_ - start));
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<std::int64_t> model_value(const SExpr& v) {
  if (!v.is_list) {
    if (v.atom == "true") return 1;
    if (v.atom == "false") return 0;
    try {
      std::size_t used = 0;
      const long long x = std::stoll(v.atom, &used);
      if (used == v.atom.size()) return x;
    } catch (const std::exception&) {
    }
    return std::nullopt;
  }
  if (v.items.size() == 2 && !v.items[0].is_list && v.items[0].atom == "-") {
    auto inner = model_value(v.items[1]);
    if (inner) return -*inner;
  }
  return std::nullopt;
}

Model parse_model(const std::string& text, const std::string& raw) {
  SExprReader reader(text);
  auto top = reader.next();
  if (!top || !top->is_list) throw SolverProtocolError(raw);
  std::vector<SExpr> defs = top->items;
  if (!defs.empty() && !defs.front().is_list && defs.front().atom == "model") defs.erase(defs.begin());
  Model m;
  for (const auto& d : defs) {
    if (!d.is_list || d.items.size() != 5 || d.items[0].atom != "define-fun") continue;
    if (!d.items[2].is_list || !d.items[2].items.empty()) continue;  // function definitions
    auto value = model_value(d.items[4]);
    if (!value) throw SolverProtocolError(raw);
    m[source_symbol(d.items[1].atom)] = *value;
  }
  return m;
}

bool on_path(const std::string& exe) {
  if (exe.find('/') != std::string::npos) return ::access(exe.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream dirs(path);
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (::access((dir + "/" + exe).c_str(), X_OK) == 0) return true;
  }
  return false;
}

struct RunResult {
  bool timed_out = false;
  std::string out;
  std::string err;
};

RunResult run_solver(const SolverConfig& solver, const std::string& input) {
  if (!on_path(solver.executable)) throw SolverNotFound(solver.executable);
  static const bool sigpipe_ignored = [] {
    ::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)sigpipe_ignored;
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0 || ::pipe2(err_pipe, O_CLOEXEC) != 0) {
    throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
  }
  std::vector<std::string> argv_storage{solver.executable};
  argv_storage.insert(argv_storage.end(), solver.args.begin(), solver.args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);

  RunResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(solver.timeout_ms);
  std::size_t written = 0;
  int in_fd = in_pipe[1];
  if (input.empty()) {
    ::close(in_fd);
    in_fd = -1;
  }
  bool out_open = true, err_open = true;
  char buf[4096];
  while (out_open || err_open) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    const int wait_ms =
        static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count()) + 1;
    std::vector<pollfd> fds;
    if (out_open) fds.push_back({out_pipe[0], POLLIN, 0});
    if (err_open) fds.push_back({err_pipe[0], POLLIN, 0});
    if (in_fd >= 0) fds.push_back({in_fd, POLLOUT, 0});
    const int ready = ::poll(fds.data(), fds.size(), wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const auto& p : fds) {
      if (!p.revents) continue;
      if (p.fd == in_fd) {
        const ssize_t n = ::write(in_fd, input.data() + written, input.size() - written);
        if (n > 0) written += static_cast<std::size_t>(n);
        if (n < 0 || written == input.size()) {
          ::close(in_fd);
          in_fd = -1;
        }
        continue;
      }
      const ssize_t n = ::read(p.fd, buf, sizeof buf);
      if (n <= 0) {
        (p.fd == out_pipe[0] ? out_open : err_open) = false;
      } else {
        (p.fd == out_pipe[0] ? result.out : result.err).append(buf, static_cast<std::size_t>(n));
      }
    }
  }
  if (in_fd >= 0) ::close(in_fd);
  ::close(out_pipe[0]);
  ::close(err_pipe[0]);
  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!result.timed_out && WIFEXITED(status) && WEXITSTATUS(status) == 127 && result.out.empty()) {
    throw SolverNotFound(solver.executable);
  }
  return result;
}

std::string first_line(const std::string& s, std::size_t* rest) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.find('\n', b);
  if (e == std::string::npos) e = s.size();
  *rest = e;
  std::string line = s.substr(b, e - b);
  while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
  return line;
}

}  // namespace

std::string to_smt(const hoare::Entailment& e) {
  std::ostringstream out;
  out << "(set-option :produce-models true)\n";
  for (const auto& name : symbol_order(e)) {
    auto it = e.symbols.find(name);
    const bool is_bool = it != e.symbols.end() && it->second == lang::Type::Bool;
    out << "(declare-const " << smt_symbol(name) << (is_bool ? " Bool" : " Int") << ")\n";
  }
  for (const auto& c : e.hypothesis) out << "(assert " << term(*c.formula) << ")\n";
  std::vector<std::string> divisors;
  std::set<std::string> seen;
  for (const auto& c : e.hypothesis) collect_divisors(*c.formula, divisors, seen);
  collect_divisors(*e.conclusion, divisors, seen);
  for (const auto& d : divisors) out << "(assert (distinct " << d << " 0))\n";
  out << "(assert (not " << term(*e.conclusion) << "))\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

Verdict check_smt(const hoare::Entailment& e, const SolverConfig& solver) {
  const auto start = std::chrono::steady_clock::now();
  const std::string script = to_smt(e);
  if (solver.dump_dir) {
    std::filesystem::create_directories(*solver.dump_dir);
    char name[32];
    std::snprintf(name, sizeof name, "check_%04u.smt2", e.id);
    std::ofstream(*solver.dump_dir / name) << script;
  }
  const RunResult run = run_solver(solver, script);
  Verdict v;
  if (run.timed_out) {
    v.status = Status::Timeout;
  } else {
    std::size_t rest = 0;
    const std::string head = first_line(run.out, &rest);
    if (head == "unsat") {
      v.status = Status::Valid;
    } else if (head == "sat") {
      v.status = Status::Invalid;
      v.counterexample = parse_model(run.out.substr(rest), run.out);
      for (const auto& name : symbol_order(e)) v.counterexample->emplace(name, 0);  // unconstrained
    } else if (head == "unknown") {
      v.status = Status::Unknown;
    } else if (head == "timeout") {
      v.status = Status::Timeout;
    } else {
      throw SolverProtocolError(run.out + run.err);
    }
  }
  v.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return v;
}

}  // namespace hoarefix::entail

#include <map>
#include <set>

#include "hoarefix/lang.hpp"

namespace hoarefix::lang {

namespace {

struct Fragment {
  int depth = 0;
  std::string text;
};

class Layout {
 public:
  void put(int line, int depth, std::string text) {
    if (line <= 0) return;
    lines_[line].push_back(Fragment{depth, std::move(text)});
  }

  void mark(int line) { marked_.insert(line); }

  std::string render(std::size_t min_lines, bool trailing_newline) const {
    std::size_t total = min_lines;
    if (!lines_.empty()) total = std::max(total, static_cast<std::size_t>(lines_.rbegin()->first));
    std::string out;
    for (std::size_t l = 1; l <= total; ++l) {
      auto it = lines_.find(static_cast<int>(l));
      if (it != lines_.end()) {
        out.append(static_cast<std::size_t>(2 * it->second.front().depth), ' ');
        for (std::size_t k = 0; k < it->second.size(); ++k) {
          if (k) out += ' ';
          out += it->second[k].text;
        }
        if (marked_.count(static_cast<int>(l))) out += " //buggy line";
      }
      if (l < total || trailing_newline) out += '\n';
    }
    return out;
  }

 private:
  std::map<int, std::vector<Fragment>> lines_;
  std::set<int> marked_;
};

std::string params_text(const std::vector<Param>& ps) {
  std::string s;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (i) s += ", ";
    s += ps[i].name + ": " + std::string(to_string(ps[i].type));
  }
  return s;
}

void emit_block(const Block& b, int depth, Layout& out, bool braces = true);

void emit_stmt(const Stmt& s, int depth, Layout& out) {
  if (s.marked) out.mark(s.line);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, VarDecl>) {
          std::string text = "var " + n.name + ": " + std::string(to_string(n.type));
          if (n.init) text += " := " + to_string(n.init);
          out.put(s.line, depth, text + ";");
        } else if constexpr (std::is_same_v<T, Assign>) {
          out.put(s.line, depth, n.target + " := " + to_string(n.value) + ";");
        } else if constexpr (std::is_same_v<T, Return>) {
          std::string text = "return";
          for (std::size_t i = 0; i < n.values.size(); ++i) text += (i ? ", " : " ") + to_string(n.values[i]);
          out.put(s.line, depth, text + ";");
        } else if constexpr (std::is_same_v<T, If>) {
          out.put(s.line, depth, "if " + to_string(n.cond));
          emit_block(n.then_block, depth, out);
          if (n.else_block) {
            out.put(n.else_line, depth, "else");
            if (n.else_is_if) {
              emit_stmt(n.else_block->stmts.front(), depth, out);
            } else {
              emit_block(*n.else_block, depth, out);
            }
          }
        } else if constexpr (std::is_same_v<T, While>) {
          out.put(s.line, depth, "while " + to_string(n.cond));
          for (const auto& inv : n.invariants) out.put(inv.line, depth + 1, "invariant " + to_string(inv.expr));
          if (n.decreases) out.put(n.decreases->line, depth + 1, "decreases " + to_string(n.decreases->expr));
          emit_block(n.body, depth, out);
        } else {
          emit_block(n.block, depth, out);
        }
      },
      s.node);
}

void emit_block(const Block& b, int depth, Layout& out, bool braces) {
  if (braces) out.put(b.open_line, depth, "{");
  for (const auto& s : b.stmts) emit_stmt(s, depth + 1, out);
  if (braces) out.put(b.close_line, depth, "}");
}

}  // namespace

std::string format_program(const Program& program) {
  Layout out;
  for (const auto& m : program.methods) {
    std::string header = "method " + m.name + "(" + params_text(m.params) + ")";
    if (!m.returns.empty()) header += " returns (" + params_text(m.returns) + ")";
    out.put(m.line, 0, header);
    for (const auto& c : m.preconditions) out.put(c.line, 1, "requires " + to_string(c.expr));
    for (const auto& c : m.postconditions) out.put(c.line, 1, "ensures " + to_string(c.expr));
    emit_block(m.body, 0, out);
  }
  return out.render(program.lines.size(), program.trailing_newline);
}

}  // namespace hoarefix::lang

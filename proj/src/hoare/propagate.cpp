#include <set>

#include "hoarefix/hoare.hpp"

namespace hoarefix::hoare {

using lang::BinaryOp;
using lang::Binary;
using lang::Expr;
using lang::ExprPtr;
using lang::Type;

std::string_view to_string(EntailmentKind kind) {
  switch (kind) {
    case EntailmentKind::Postcondition: return "postcondition";
    case EntailmentKind::LoopInit: return "loop-init";
    case EntailmentKind::LoopMaintain: return "loop-maintain";
  }
  return "?";
}

NonLinearPathExplosion::NonLinearPathExplosion(std::size_t limit, int line)
    : std::runtime_error("more than " + std::to_string(limit) + " paths after line " + std::to_string(line)),
      limit_(limit) {}

ExprPtr substitute(const ExprPtr& formula, const Store& values) {
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::VarRef>) {
          auto it = values.find(n.name);
          return it == values.end() ? formula : it->second;
        } else if constexpr (std::is_same_v<T, lang::Unary>) {
          ExprPtr inner = substitute(n.operand, values);
          if (inner == n.operand) return formula;
          return lang::make_unary(n.op, inner, n.op_span);
        } else if constexpr (std::is_same_v<T, lang::Binary>) {
          ExprPtr l = substitute(n.lhs, values);
          ExprPtr r = substitute(n.rhs, values);
          if (l == n.lhs && r == n.rhs) return formula;
          return lang::make_binary(n.op, l, r, n.op_span);
        } else {
          return formula;
        }
      },
      formula->node);
}

ExprPtr substitute(const ExprPtr& formula, const std::string& var, const ExprPtr& value) {
  return substitute(formula, Store{{var, value}});
}

ExprPtr negate(const ExprPtr& formula) {
  if (const auto* b = std::get_if<Binary>(&formula->node)) {
    std::optional<BinaryOp> flipped;
    switch (b->op) {
      case BinaryOp::Lt: flipped = BinaryOp::Ge; break;
      case BinaryOp::Le: flipped = BinaryOp::Gt; break;
      case BinaryOp::Gt: flipped = BinaryOp::Le; break;
      case BinaryOp::Ge: flipped = BinaryOp::Lt; break;
      case BinaryOp::Eq: flipped = BinaryOp::Neq; break;
      case BinaryOp::Neq: flipped = BinaryOp::Eq; break;
      default: break;
    }
    if (flipped) return lang::make_binary(*flipped, b->lhs, b->rhs, b->op_span);
  }
  if (const auto* u = std::get_if<lang::Unary>(&formula->node); u && u->op == lang::UnaryOp::Not) {
    return u->operand;
  }
  if (const auto* lit = std::get_if<lang::BoolLit>(&formula->node)) return lang::make_bool(!lit->value);
  return lang::make_unary(lang::UnaryOp::Not, formula);
}

namespace {

void collect_symbols(const Expr& e, std::map<std::string, Type>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::VarRef>) {
          out.emplace(n.name, e.type);
        } else if constexpr (std::is_same_v<T, lang::Unary>) {
          collect_symbols(*n.operand, out);
        } else if constexpr (std::is_same_v<T, lang::Binary>) {
          collect_symbols(*n.lhs, out);
          collect_symbols(*n.rhs, out);
        }
      },
      e.node);
}

void collect_assigned(const lang::Block& b, std::set<std::string>& out);

void collect_assigned(const lang::Stmt& s, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::Assign>) {
          out.insert(n.target);
        } else if constexpr (std::is_same_v<T, lang::If>) {
          collect_assigned(n.then_block, out);
          if (n.else_block) collect_assigned(*n.else_block, out);
        } else if constexpr (std::is_same_v<T, lang::While>) {
          collect_assigned(n.body, out);
        } else if constexpr (std::is_same_v<T, lang::BlockStmt>) {
          collect_assigned(n.block, out);
        }
      },
      s.node);
}

void collect_assigned(const lang::Block& b, std::set<std::string>& out) {
  for (const auto& s : b.stmts) collect_assigned(s, out);
}

void collect_decls(const lang::Block& b, std::map<std::string, Type>& out) {
  for (const auto& s : b.stmts) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, lang::VarDecl>) {
            out[n.name] = n.type;
          } else if constexpr (std::is_same_v<T, lang::If>) {
            collect_decls(n.then_block, out);
            if (n.else_block) collect_decls(*n.else_block, out);
          } else if constexpr (std::is_same_v<T, lang::While>) {
            collect_decls(n.body, out);
          } else if constexpr (std::is_same_v<T, lang::BlockStmt>) {
            collect_decls(n.block, out);
          }
        },
        s.node);
  }
}

StateCondition fact(ExprPtr formula, std::optional<int> origin) {
  StateCondition c;
  c.formula = std::move(formula);
  c.origin = origin;
  return c;
}

struct Path {
  std::vector<StateCondition> conditions;
  Store store;
  std::set<std::string> bound;  // variables whose value is pinned by a binding fact
  std::vector<int> trace;
};

class Propagator {
 public:
  Propagator(const lang::Method& m, const PropagateOptions& opt) : method_(m), options_(opt) {
    for (const auto& p : m.params) types_[p.name] = p.type;
    for (const auto& r : m.returns) types_[r.name] = r.type;
    collect_decls(m.body, types_);
  }

  Analysis run() {
    out_.method = method_.name;
    Path init;
    for (const auto& p : method_.params) init.store[p.name] = lang::make_var(p.name, p.type);
    for (const auto& r : method_.returns) init.store[r.name] = fresh(r.name);
    for (const auto& c : method_.preconditions) init.conditions.push_back(fact(c.expr, std::nullopt));

    std::vector<Path> live = exec_block(method_.body, {std::move(init)});
    for (auto& p : live) emit_postconditions(p, method_.body.close_line);
    return std::move(out_);
  }

 private:
  ExprPtr fresh(const std::string& name) {
    return lang::make_var(name + "@" + std::to_string(next_fresh_++), types_.at(name));
  }

  static ExprPtr value_of(const ExprPtr& e, const Path& p) { return substitute(e, p.store); }

  /// Source names stay for variables pinned by a binding fact; everything
  /// else is replaced by its current symbol.
  static ExprPtr render(const ExprPtr& e, const Path& p) {
    Store subst;
    for (const auto& v : lang::free_variables(*e)) {
      if (!p.bound.count(v)) {
        auto it = p.store.find(v);
        if (it != p.store.end()) subst.emplace(v, it->second);
      }
    }
    return substitute(e, subst);
  }

  static void drop_binding(Path& p, const std::string& var) {
    std::erase_if(p.conditions, [&](const StateCondition& c) { return c.binds == var; });
    p.bound.erase(var);
  }

  void bind(Path& p, const std::string& var, ExprPtr value, int line) {
    drop_binding(p, var);
    p.store[var] = value;
    p.bound.insert(var);
    ExprPtr fact = lang::make_binary(BinaryOp::Eq, lang::make_var(var, types_.at(var)), std::move(value));
    p.conditions.push_back(StateCondition{std::move(fact), line, Check::Unchecked, var});
  }

  void record(int line, const std::vector<StateCondition>& in, const Path& after) {
    out_.contexts.push_back(StatementContext{line, in, after.conditions, after.store});
  }

  void emit(EntailmentKind kind, const lang::Clause& clause, int control_point, const Path& p) {
    Entailment e;
    e.id = static_cast<std::uint32_t>(out_.entailments.size());
    e.kind = kind;
    e.hypothesis = p.conditions;
    e.conclusion = render(clause.expr, p);
    e.control_point = control_point;
    e.clause_line = clause.line;
    e.path = p.trace;
    for (const auto& c : e.hypothesis) collect_symbols(*c.formula, e.symbols);
    collect_symbols(*e.conclusion, e.symbols);
    out_.entailments.push_back(std::move(e));
  }

  void emit_postconditions(const Path& p, int control_point) {
    for (const auto& c : method_.postconditions) emit(EntailmentKind::Postcondition, c, control_point, p);
  }

  std::vector<Path> exec_block(const lang::Block& b, std::vector<Path> paths) {
    std::vector<std::string> locals;
    for (const auto& s : b.stmts) {
      if (const auto* d = std::get_if<lang::VarDecl>(&s.node)) locals.push_back(d->name);
      std::vector<Path> next;
      for (auto& p : paths) exec_stmt(s, std::move(p), next);
      if (next.size() > options_.max_paths) throw NonLinearPathExplosion(options_.max_paths, s.line);
      paths = std::move(next);
    }
    for (auto& p : paths) {
      for (const auto& name : locals) {
        drop_binding(p, name);
        p.store.erase(name);
      }
    }
    return paths;
  }

  void exec_stmt(const lang::Stmt& s, Path p, std::vector<Path>& out) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, lang::VarDecl>) {
            const auto in = p.conditions;
            p.trace.push_back(s.line);
            if (n.init) {
              bind(p, n.name, value_of(n.init, p), s.line);
            } else {
              p.store[n.name] = fresh(n.name);
            }
            record(s.line, in, p);
            out.push_back(std::move(p));
          } else if constexpr (std::is_same_v<T, lang::Assign>) {
            const auto in = p.conditions;
            p.trace.push_back(s.line);
            bind(p, n.target, value_of(n.value, p), s.line);
            record(s.line, in, p);
            out.push_back(std::move(p));
          } else if constexpr (std::is_same_v<T, lang::Return>) {
            const auto in = p.conditions;
            p.trace.push_back(s.line);
            std::vector<ExprPtr> values;
            for (const auto& v : n.values) values.push_back(value_of(v, p));
            for (std::size_t i = 0; i < values.size(); ++i) bind(p, method_.returns[i].name, values[i], s.line);
            record(s.line, in, p);
            emit_postconditions(p, s.line);
          } else if constexpr (std::is_same_v<T, lang::If>) {
            exec_if(s, n, std::move(p), out);
          } else if constexpr (std::is_same_v<T, lang::While>) {
            exec_while(s, n, std::move(p), out);
          } else {
            for (auto& q : exec_block(n.block, {std::move(p)})) out.push_back(std::move(q));
          }
        },
        s.node);
  }

  void exec_if(const lang::Stmt& s, const lang::If& n, Path p, std::vector<Path>& out) {
    p.trace.push_back(s.line);
    const ExprPtr guard = value_of(n.cond, p);
    Path then_path = p;
    then_path.conditions.push_back(fact(guard, s.line));
    record(s.line, p.conditions, then_path);
    Path else_path = std::move(p);
    const auto in = else_path.conditions;
    else_path.conditions.push_back(fact(negate(guard), s.line));
    record(s.line, in, else_path);

    for (auto& q : exec_block(n.then_block, {std::move(then_path)})) out.push_back(std::move(q));
    if (n.else_block) {
      for (auto& q : exec_block(*n.else_block, {std::move(else_path)})) out.push_back(std::move(q));
    } else {
      out.push_back(std::move(else_path));
    }
  }

  void exec_while(const lang::Stmt& s, const lang::While& n, Path p, std::vector<Path>& out) {
    p.trace.push_back(s.line);
    if (n.decreases) {
      out_.warnings.push_back("line " + std::to_string(n.decreases->line) +
                              ": decreases clause ignored, termination is not checked");
    }
    for (const auto& inv : n.invariants) emit(EntailmentKind::LoopInit, inv, s.line, p);

    std::set<std::string> modified;
    collect_assigned(n.body, modified);
    Path head = std::move(p);
    for (const auto& v : modified) {
      if (!head.store.count(v)) continue;  // declared inside the body
      drop_binding(head, v);
      head.store[v] = fresh(v);
    }
    for (const auto& inv : n.invariants) {
      head.conditions.push_back(fact(value_of(inv.expr, head), std::nullopt));
    }
    const ExprPtr guard = value_of(n.cond, head);

    Path iteration = head;
    iteration.conditions.push_back(fact(guard, s.line));
    record(s.line, head.conditions, iteration);
    for (auto& q : exec_block(n.body, {std::move(iteration)})) {
      for (const auto& inv : n.invariants) emit(EntailmentKind::LoopMaintain, inv, n.body.close_line, q);
    }

    const auto in = head.conditions;
    head.conditions.push_back(fact(negate(guard), s.line));
    record(s.line, in, head);
    out.push_back(std::move(head));
  }

  const lang::Method& method_;
  PropagateOptions options_;
  Analysis out_;
  std::map<std::string, Type> types_;
  int next_fresh_ = 0;
};

void walk_sites(const lang::Block& b, std::vector<AssignmentSite>& out) {
  for (const auto& s : b.stmts) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, lang::VarDecl>) {
            if (n.init) out.push_back({s.line, n.name});
          } else if constexpr (std::is_same_v<T, lang::Assign>) {
            out.push_back({s.line, n.target});
          } else if constexpr (std::is_same_v<T, lang::If>) {
            walk_sites(n.then_block, out);
            if (n.else_block) walk_sites(*n.else_block, out);
          } else if constexpr (std::is_same_v<T, lang::While>) {
            walk_sites(n.body, out);
          } else if constexpr (std::is_same_v<T, lang::BlockStmt>) {
            walk_sites(n.block, out);
          }
        },
        s.node);
  }
}

}  // namespace

std::string Entailment::to_string() const {
  return "(" + lang::to_string(hypothesis_formula()) + ") ==> (" + lang::to_string(conclusion) + ")";
}

ExprPtr Entailment::hypothesis_formula() const {
  ExprPtr acc;
  for (const auto& c : hypothesis) {
    acc = acc ? lang::make_binary(BinaryOp::And, acc, c.formula) : c.formula;
  }
  return acc ? acc : lang::make_bool(true);
}

Analysis propagate(const lang::Method& method, const PropagateOptions& options) {
  return Propagator(method, options).run();
}

std::vector<AssignmentSite> assignment_sites(const lang::Method& method) {
  std::vector<AssignmentSite> out;
  walk_sites(method.body, out);
  return out;
}

}  // namespace hoarefix::hoare

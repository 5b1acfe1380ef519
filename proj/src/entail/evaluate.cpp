#include <algorithm>
#include <chrono>
#include <set>

#include "arith.hpp"
#include "hoarefix/entail.hpp"

namespace hoarefix::entail {

using lang::BinaryOp;
using lang::Expr;
using lang::Type;

TooManySymbols::TooManySymbols(std::size_t count, std::size_t limit)
    : std::runtime_error(std::to_string(count) + " symbols to enumerate, limit is " + std::to_string(limit)) {}

BoundTooLarge::BoundTooLarge(int bound, int limit)
    : std::runtime_error("bound " + std::to_string(bound) + " outside [1, " + std::to_string(limit) + "]") {}

std::optional<std::int64_t> eval_int(const Expr& e, const Model& env) {
  return std::visit(
      [&](const auto& n) -> std::optional<std::int64_t> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, lang::IntLit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, lang::BoolLit>) {
          return n.value ? 1 : 0;
        } else if constexpr (std::is_same_v<T, lang::VarRef>) {
          auto it = env.find(n.name);
          if (it == env.end()) return std::nullopt;
          return it->second;
        } else if constexpr (std::is_same_v<T, lang::Unary>) {
          auto v = eval_int(*n.operand, env);
          if (!v) return std::nullopt;
          if (n.op == lang::UnaryOp::Not) return *v ? 0 : 1;
          return arith::neg(*v);
        } else {
          auto a = eval_int(*n.lhs, env);
          auto b = eval_int(*n.rhs, env);
          if (!a || !b) return std::nullopt;
          switch (n.op) {
            case BinaryOp::Add: return arith::add(*a, *b);
            case BinaryOp::Sub: return arith::sub(*a, *b);
            case BinaryOp::Mul: return arith::mul(*a, *b);
            case BinaryOp::Div: return arith::div(*a, *b);
            case BinaryOp::Mod: return arith::mod(*a, *b);
            case BinaryOp::Lt: return *a < *b;
            case BinaryOp::Le: return *a <= *b;
            case BinaryOp::Gt: return *a > *b;
            case BinaryOp::Ge: return *a >= *b;
            case BinaryOp::Eq: return *a == *b;
            case BinaryOp::Neq: return *a != *b;
            case BinaryOp::And: return *a && *b;
            case BinaryOp::Or: return *a || *b;
            case BinaryOp::Implies: return !*a || *b;
          }
          return std::nullopt;
        }
      },
      e.node);
}

std::optional<bool> eval_bool(const Expr& e, const Model& env) {
  auto v = eval_int(e, env);
  if (!v) return std::nullopt;
  return *v != 0;
}

bool falsifies(const hoare::Entailment& e, const Model& model) {
  for (const auto& c : e.hypothesis) {
    auto v = eval_bool(*c.formula, model);
    if (!v || !*v) return false;
  }
  auto concl = eval_bool(*e.conclusion, model);
  return concl && !*concl;
}

std::vector<std::string> symbol_order(const hoare::Entailment& e) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  auto walk = [&](auto&& self, const Expr& x) -> void {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, lang::VarRef>) {
            if (seen.insert(n.name).second) order.push_back(n.name);
          } else if constexpr (std::is_same_v<T, lang::Unary>) {
            self(self, *n.operand);
          } else if constexpr (std::is_same_v<T, lang::Binary>) {
            self(self, *n.lhs);
            self(self, *n.rhs);
          }
        },
        x.node);
  };
  for (const auto& c : e.hypothesis) walk(walk, *c.formula);
  walk(walk, *e.conclusion);
  return order;
}

namespace {

/// Flat, slot-indexed form of an expression for the enumeration inner loop.
class Compiled {
 public:
  Compiled(const Expr& e, const std::map<std::string, std::size_t>& slots) { root_ = add(e, slots); }

  std::optional<std::int64_t> eval(const std::vector<std::int64_t>& env) const { return eval(root_, env); }

 private:
  enum class Kind { Const, Slot, Neg, Not, Bin };
  struct Node {
    Kind kind;
    BinaryOp op = BinaryOp::Add;
    std::int64_t value = 0;
    std::size_t a = 0, b = 0;
  };

  std::size_t add(const Expr& e, const std::map<std::string, std::size_t>& slots) {
    Node n{Kind::Const};
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, lang::IntLit>) {
            n.value = x.value;
          } else if constexpr (std::is_same_v<T, lang::BoolLit>) {
            n.value = x.value ? 1 : 0;
          } else if constexpr (std::is_same_v<T, lang::VarRef>) {
            n.kind = Kind::Slot;
            n.a = slots.at(x.name);
          } else if constexpr (std::is_same_v<T, lang::Unary>) {
            n.kind = x.op == lang::UnaryOp::Neg ? Kind::Neg : Kind::Not;
            n.a = add(*x.operand, slots);
          } else {
            n.kind = Kind::Bin;
            n.op = x.op;
            n.a = add(*x.lhs, slots);
            n.b = add(*x.rhs, slots);
          }
        },
        e.node);
    nodes_.push_back(n);
    return nodes_.size() - 1;
  }

  std::optional<std::int64_t> eval(std::size_t i, const std::vector<std::int64_t>& env) const {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case Kind::Const: return n.value;
      case Kind::Slot: return env[n.a];
      case Kind::Neg: {
        auto v = eval(n.a, env);
        return v ? arith::neg(*v) : std::nullopt;
      }
      case Kind::Not: {
        auto v = eval(n.a, env);
        return v ? std::optional<std::int64_t>(*v ? 0 : 1) : std::nullopt;
      }
      case Kind::Bin: break;
    }
    auto a = eval(n.a, env);
    if (!a) return std::nullopt;
    auto b = eval(n.b, env);
    if (!b) return std::nullopt;
    switch (n.op) {
      case BinaryOp::Add: return arith::add(*a, *b);
      case BinaryOp::Sub: return arith::sub(*a, *b);
      case BinaryOp::Mul: return arith::mul(*a, *b);
      case BinaryOp::Div: return arith::div(*a, *b);
      case BinaryOp::Mod: return arith::mod(*a, *b);
      case BinaryOp::Lt: return *a < *b;
      case BinaryOp::Le: return *a <= *b;
      case BinaryOp::Gt: return *a > *b;
      case BinaryOp::Ge: return *a >= *b;
      case BinaryOp::Eq: return *a == *b;
      case BinaryOp::Neq: return *a != *b;
      case BinaryOp::And: return *a && *b;
      case BinaryOp::Or: return *a || *b;
      case BinaryOp::Implies: return !*a || *b;
    }
    return std::nullopt;
  }

  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

struct Definition {
  std::string symbol;
  lang::ExprPtr value;
};

struct Plan {
  std::vector<std::string> enumerated;
  std::vector<Definition> definitions;  // evaluation order
};

Plan make_plan(const hoare::Entailment& e) {
  const std::vector<std::string> symbols = symbol_order(e);
  std::map<std::string, lang::ExprPtr> candidates;
  for (const auto& c : e.hypothesis) {
    const auto* b = std::get_if<lang::Binary>(&c.formula->node);
    if (!b || b->op != BinaryOp::Eq) continue;
    const auto* v = std::get_if<lang::VarRef>(&b->lhs->node);
    if (!v || candidates.count(v->name)) continue;
    const auto deps = lang::free_variables(*b->rhs);
    if (std::find(deps.begin(), deps.end(), v->name) != deps.end()) continue;
    candidates.emplace(v->name, b->rhs);
  }

  Plan plan;
  std::set<std::string> known;
  for (const auto& s : symbols) {
    if (!candidates.count(s)) {
      plan.enumerated.push_back(s);
      known.insert(s);
    }
  }
  std::vector<std::string> pending;
  for (const auto& s : symbols) {
    if (candidates.count(s)) pending.push_back(s);
  }
  while (!pending.empty()) {
    bool progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      const auto deps = lang::free_variables(*candidates.at(*it));
      if (std::all_of(deps.begin(), deps.end(), [&](const std::string& d) { return known.count(d) > 0; })) {
        plan.definitions.push_back(Definition{*it, candidates.at(*it)});
        known.insert(*it);
        it = pending.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
    if (!progress) {
      // Cyclic definitions: enumerate the first one instead.
      plan.enumerated.push_back(pending.front());
      known.insert(pending.front());
      pending.erase(pending.begin());
    }
  }
  return plan;
}

}  // namespace

std::vector<std::string> enumerated_symbols(const hoare::Entailment& e) { return make_plan(e).enumerated; }

Verdict check_bruteforce(const hoare::Entailment& e, int bound) {
  const auto start = std::chrono::steady_clock::now();
  if (bound < 1 || bound > kMaxBound) throw BoundTooLarge(bound, kMaxBound);
  const Plan plan = make_plan(e);
  if (plan.enumerated.size() > kMaxBruteSymbols) throw TooManySymbols(plan.enumerated.size(), kMaxBruteSymbols);

  std::map<std::string, std::size_t> slots;
  for (const auto& s : plan.enumerated) slots.emplace(s, slots.size());
  for (const auto& d : plan.definitions) slots.emplace(d.symbol, slots.size());

  std::vector<Compiled> defs;
  for (const auto& d : plan.definitions) defs.emplace_back(*d.value, slots);
  std::vector<Compiled> hyps;
  for (const auto& c : e.hypothesis) hyps.emplace_back(*c.formula, slots);
  const Compiled concl(*e.conclusion, slots);

  // Domain per enumerated symbol, ordered by magnitude so counterexamples stay small.
  std::vector<std::vector<std::int64_t>> domains;
  for (const auto& s : plan.enumerated) {
    std::vector<std::int64_t> d;
    auto type = e.symbols.find(s);
    if (type != e.symbols.end() && type->second == Type::Bool) {
      d = {0, 1};
    } else {
      d.push_back(0);
      for (int k = 1; k <= bound; ++k) {
        d.push_back(k);
        d.push_back(-k);
      }
    }
    domains.push_back(std::move(d));
  }

  std::vector<std::int64_t> env(slots.size(), 0);
  std::vector<std::size_t> index(domains.size(), 0);
  Verdict verdict;
  verdict.status = Status::Valid;
  for (;;) {
    for (std::size_t i = 0; i < domains.size(); ++i) env[i] = domains[i][index[i]];
    bool skip = false;
    for (std::size_t k = 0; k < defs.size() && !skip; ++k) {
      auto v = defs[k].eval(env);
      if (!v) skip = true;
      else env[domains.size() + k] = *v;
    }
    bool hyp = !skip;
    for (std::size_t k = 0; k < hyps.size() && hyp; ++k) {
      auto v = hyps[k].eval(env);
      if (!v) skip = true;
      hyp = v && *v;
    }
    if (hyp) {
      auto c = concl.eval(env);
      if (c && !*c) {
        verdict.status = Status::Invalid;
        Model m;
        for (const auto& [name, slot] : slots) m[name] = env[slot];
        verdict.counterexample = std::move(m);
        break;
      }
    }
    std::size_t pos = 0;
    while (pos < index.size() && ++index[pos] == domains[pos].size()) index[pos++] = 0;
    if (pos == index.size()) break;
  }
  verdict.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return verdict;
}

}  // namespace hoarefix::entail

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoarefix/lang.hpp"

namespace hoarefix::hoare {

enum class Check { Unchecked, Holds, Failed };

/// One fact about program state. `origin` is the statement line that
/// established it; facts taken from `requires` clauses or loop invariants
/// have no origin and never implicate a line.
struct StateCondition {
  lang::ExprPtr formula;
  std::optional<int> origin;
  Check verified = Check::Unchecked;
  /// Variable this fact binds (`x == <value>`), empty for path facts.
  std::string binds;
};

using Store = std::map<std::string, lang::ExprPtr>;

struct StatementContext {
  int line = 0;
  std::vector<StateCondition> incoming;
  std::vector<StateCondition> outgoing;
  Store store;
};

enum class EntailmentKind { Postcondition, LoopInit, LoopMaintain };

std::string_view to_string(EntailmentKind kind);

struct Entailment {
  std::uint32_t id = 0;
  EntailmentKind kind = EntailmentKind::Postcondition;
  std::vector<StateCondition> hypothesis;
  lang::ExprPtr conclusion;
  /// Return line, loop line, or the closing brace for implicit exits and
  /// the end of a loop body.
  int control_point = 0;
  /// Line of the ensures/invariant clause being proven.
  int clause_line = 0;
  /// Statement lines executed along the path that reached the control point.
  std::vector<int> path;
  /// Type of every symbol occurring in the entailment.
  std::map<std::string, lang::Type> symbols;

  /// `(h1 && h2 && ...) ==> (conclusion)`
  std::string to_string() const;
  /// Hypothesis conjunction (`true` when empty).
  lang::ExprPtr hypothesis_formula() const;
};

struct Analysis {
  std::string method;
  std::vector<StatementContext> contexts;
  std::vector<Entailment> entailments;  // ids 0..n-1 in vector order
  std::vector<std::string> warnings;
};

struct PropagateOptions {
  std::size_t max_paths = 256;
};

class NonLinearPathExplosion : public std::runtime_error {
 public:
  NonLinearPathExplosion(std::size_t limit, int line);
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

/// Capture-free substitution of every occurrence of `var` by `value`.
lang::ExprPtr substitute(const lang::ExprPtr& formula, const std::string& var, const lang::ExprPtr& value);
/// Simultaneous substitution.
lang::ExprPtr substitute(const lang::ExprPtr& formula, const Store& values);

/// Logical negation that flips comparisons instead of wrapping them.
lang::ExprPtr negate(const lang::ExprPtr& formula);

/// Forward state propagation over the method body.
Analysis propagate(const lang::Method& method, const PropagateOptions& options = {});

struct AssignmentSite {
  int line = 0;
  std::string variable;
  bool operator==(const AssignmentSite&) const = default;
};

/// Every Assign and initialized VarDecl, in source order.
std::vector<AssignmentSite> assignment_sites(const lang::Method& method);

}  // namespace hoarefix::hoare

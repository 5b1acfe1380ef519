#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoarefix/entail.hpp"
#include "hoarefix/lang.hpp"

namespace hoarefix::mutate {

enum class Strategy { OperatorReplacement, CoefficientModification, VariableReordering, Combined };

inline constexpr Strategy kAllStrategies[] = {Strategy::OperatorReplacement, Strategy::CoefficientModification,
                                              Strategy::VariableReordering, Strategy::Combined};

std::string_view to_string(Strategy s);
/// Short tag used in mutant names: op, coef, reorder, combined.
std::string_view tag(Strategy s);
/// Accepts either the short tag or the full name.
std::optional<Strategy> parse_strategy(std::string_view s);

/// Deterministic generator; uniform draws use rejection sampling so results
/// do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t derive_seed(std::uint64_t seed, std::string_view program, int line, Strategy s);

struct OperatorToken {
  lang::BinaryOp op;
  lang::Span span;
};

struct ConstantToken {
  std::int64_t value;
  lang::Span span;
};

struct VariableToken {
  std::string name;
  lang::Type type;
  lang::Span span;
};

/// Mutable tokens of one statement line, in column order.
struct Site {
  int line = 0;
  std::vector<OperatorToken> operators;  // binary + - * / %
  std::vector<lang::Span> negations;     // unary minus
  std::vector<ConstantToken> constants;
  std::vector<VariableToken> variables;  // every occurrence

  std::vector<std::string> distinct_variables() const;
};

/// Executable lines holding an arithmetic operator, an integer literal or at
/// least two distinct variables. Specification lines are never sites.
std::vector<Site> find_sites(const lang::Program& p);

struct MutationRecord {
  Strategy strategy = Strategy::OperatorReplacement;
  int line = 0;
  std::string original;
  std::string mutated;
  std::uint64_t seed = 0;
};

class NoOperator : public std::invalid_argument {
 public:
  explicit NoOperator(int line);
};
class NoConstant : public std::invalid_argument {
 public:
  explicit NoConstant(int line);
};
class TooFewVariables : public std::invalid_argument {
 public:
  explicit TooFewVariables(int line);
};
class SourceNotVerified : public std::runtime_error {
 public:
  explicit SourceNotVerified(const std::string& program);
};

/// `line_text` is the raw source line the site's spans refer to.
MutationRecord mutate_operator(const Site& site, const std::string& line_text, Rng& rng);
MutationRecord mutate_coefficient(const Site& site, const std::string& line_text, Rng& rng);
MutationRecord mutate_reorder(const Site& site, const std::string& line_text, Rng& rng);
MutationRecord mutate_combined(const Site& site, const std::string& line_text, Rng& rng);
MutationRecord apply_strategy(Strategy s, const Site& site, const std::string& line_text, Rng& rng);

/// Whitespace-insensitive form used for deduplication.
std::string normalize(std::string_view text);

struct MutatedProgram {
  std::string name;  // <program>_<tag>_L<line>
  MutationRecord record;
  std::string unmarked;
  std::string marked;
};

struct GenerationResult {
  std::vector<MutatedProgram> kept;
  std::size_t discarded = 0;
};

struct GenerateOptions {
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::uint64_t seed = 0;
  entail::BackendOptions backend;
};

GenerationResult generate_bugs(const std::string& program_name, const lang::Program& p,
                               const GenerateOptions& options);

struct DatasetSummary {
  std::size_t programs = 0;  // sources that parsed and verified
  std::size_t mutants = 0;
  std::size_t discarded = 0;
  std::vector<std::string> failed;   // no usable mutant
  std::vector<std::string> skipped;  // source did not parse or verify
};

class LayoutError : public std::runtime_error {
 public:
  LayoutError(const std::filesystem::path& path, const std::string& expectation);
};

/// Builds the dataset tree from every `.dfy` file in `src_dir`.
DatasetSummary build_dataset(const std::filesystem::path& src_dir, const std::filesystem::path& out_dir,
                             const GenerateOptions& options, bool force = false);

}  // namespace hoarefix::mutate

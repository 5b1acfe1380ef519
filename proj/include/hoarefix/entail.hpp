#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoarefix/hoare.hpp"

namespace hoarefix::entail {

enum class Status { Valid, Invalid, Unknown, Timeout };

std::string_view to_string(Status s);

using Model = std::map<std::string, std::int64_t>;

struct Verdict {
  Status status = Status::Unknown;
  std::optional<Model> counterexample;
  double elapsed_ms = 0;
};

struct SolverConfig {
  std::string executable = "z3";
  std::vector<std::string> args = {"-in"};
  int timeout_ms = 20000;
  /// When set, every query is also written to `check_<id>.smt2` here.
  std::optional<std::filesystem::path> dump_dir;
};

class SolverNotFound : public std::runtime_error {
 public:
  explicit SolverNotFound(const std::string& executable);
};

class SolverProtocolError : public std::runtime_error {
 public:
  explicit SolverProtocolError(std::string raw);
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class TooManySymbols : public std::runtime_error {
 public:
  TooManySymbols(std::size_t count, std::size_t limit);
};

class BoundTooLarge : public std::runtime_error {
 public:
  BoundTooLarge(int bound, int limit);
};

inline constexpr std::size_t kMaxBruteSymbols = 6;
inline constexpr int kMaxBound = 16;

/// Free symbols of `e`, hypothesis first, in order of first occurrence.
std::vector<std::string> symbol_order(const hoare::Entailment& e);

/// SMT-LIB v2 validity query: satisfiable iff the entailment fails.
std::string to_smt(const hoare::Entailment& e);

Verdict check_smt(const hoare::Entailment& e, const SolverConfig& solver);

/// Exhaustive search over [-bound, bound] for every free symbol. Symbols
/// pinned by a top-level `v == expr` hypothesis are computed, not enumerated.
Verdict check_bruteforce(const hoare::Entailment& e, int bound);

/// Symbols check_bruteforce would enumerate for `e`.
std::vector<std::string> enumerated_symbols(const hoare::Entailment& e);

/// Integer semantics used by the brute-force backend: Euclidean `/` and `%`.
/// Returns nullopt on division by zero or overflow.
std::optional<std::int64_t> eval_int(const lang::Expr& e, const Model& env);
std::optional<bool> eval_bool(const lang::Expr& e, const Model& env);

/// Independent check of a counterexample: hypothesis true, conclusion false.
bool falsifies(const hoare::Entailment& e, const Model& model);

enum class Backend { Smt, Brute, Both };

std::string_view to_string(Backend b);
std::optional<Backend> parse_backend(std::string_view s);

struct BackendOptions {
  Backend backend = Backend::Smt;
  SolverConfig solver;
  int bound = 5;
  unsigned jobs = 1;
};

/// Brute force found a counterexample the solver did not confirm, or the
/// solver proved an entailment the bounded search refutes.
struct Disagreement {
  std::string method;
  std::uint32_t id = 0;
  Status smt = Status::Unknown;
  Status brute = Status::Unknown;
};

struct VerificationResult {
  std::string method;
  std::map<std::uint32_t, Verdict> verdicts;
  bool verified = false;
  std::vector<Disagreement> disagreements;
};

/// Agreement is only judged for entailments with at most this many
/// enumerated symbols.
inline constexpr std::size_t kAgreementSymbolLimit = 4;

Verdict discharge(const hoare::Entailment& e, const BackendOptions& options, const std::string& method,
                  std::vector<Disagreement>* disagreements);

VerificationResult discharge_all(const hoare::Analysis& analysis, const BackendOptions& options);

VerificationResult verify_method(const lang::Method& m, const BackendOptions& options);

struct ProgramVerification {
  std::vector<hoare::Analysis> analyses;
  std::vector<VerificationResult> results;
  bool verified() const;
};

ProgramVerification verify_program(const lang::Program& p, const BackendOptions& options);

}  // namespace hoarefix::entail

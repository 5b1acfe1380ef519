#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoarefix/entail.hpp"
#include "hoarefix/hoare.hpp"

namespace hoarefix::faultloc {

struct SuspiciousLine {
  int line = 0;
  /// Number of non-Valid entailments implicating the line.
  std::size_t failed = 0;
  /// Smallest control_point - line over the implicating entailments.
  int distance = 0;
  std::vector<std::uint32_t> entailments;
};

struct SuspiciousReport {
  std::string method;
  std::vector<SuspiciousLine> lines;
  double coverage = 0;  // percent of statement lines flagged
};

class MismatchedInputs : public std::invalid_argument {
 public:
  explicit MismatchedInputs(const std::string& what) : std::invalid_argument(what) {}
};

/// Ranking: more failed entailments first, then closer to the failing
/// control point, then source order.
SuspiciousReport localize(const lang::Method& m, const hoare::Analysis& analysis,
                          const entail::VerificationResult& result);

/// Reports for every method merged into one ranking (multi-method files).
SuspiciousReport merge(const std::vector<SuspiciousReport>& reports, std::size_t statement_lines);

SuspiciousReport localize_program(const lang::Program& p, const entail::ProgramVerification& v);

bool topn_hit(const SuspiciousReport& report, int true_line, std::size_t n);

/// 1-based rank of `line`, 0 when absent.
std::size_t rank_of(const SuspiciousReport& report, int line);

}  // namespace hoarefix::faultloc

#include <fstream>

#include "hoarefix/repair.hpp"
#include "hoarefix/serialize.hpp"

namespace hoarefix::repair {

std::string_view to_string(AttemptVerdict v) {
  switch (v) {
    case AttemptVerdict::Verified: return "verified";
    case AttemptVerdict::FailedVerification: return "failed-verification";
    case AttemptVerdict::Unparseable: return "unparseable";
  }
  return "?";
}

std::string_view to_string(RepairStatus s) { return s == RepairStatus::Fixed ? "fixed" : "unfixable"; }

RepairOutcome repair_loop(const lang::Program& p, const faultloc::SuspiciousReport& report, ModelClient& model,
                          const RepairOptions& options) {
  RepairOutcome outcome;
  for (const auto& suspicious : report.lines) {
    const int line = suspicious.line;
    if (!p.is_statement_line(line)) continue;
    std::vector<std::string> rejected;
    for (int attempt = 1; attempt <= kMaxAttemptsPerLine; ++attempt) {
      RepairAttempt a;
      a.line = line;
      a.attempt = attempt;
      a.prompt = build_prompt(p, line, rejected);
      a.prompt.max_tokens = options.max_tokens;
      a.prompt.temperature = options.temperature;
      try {
        a.raw = model.complete(a.prompt);
      } catch (const ModelUnavailable& e) {
        outcome.complete = false;
        outcome.error = e.what();
        outcome.status = outcome.patches.empty() ? RepairStatus::Unfixable : RepairStatus::Fixed;
        return outcome;
      }

      try {
        a.candidate = sanitize_response(a.raw);
        const lang::Program patched = lang::replace_line(p, line, *a.candidate);
        a.verdict = entail::verify_program(patched, options.backend).verified() ? AttemptVerdict::Verified
                                                                                  : AttemptVerdict::FailedVerification;
        if (a.verdict == AttemptVerdict::FailedVerification) a.rejection = "verification failed";
      } catch (const EmptyResponse& e) {
        a.verdict = AttemptVerdict::Unparseable;
        a.rejection = e.what();
      } catch (const lang::ReparseFailed& e) {
        a.verdict = AttemptVerdict::Unparseable;
        a.rejection = std::string("reparse failed: ") + e.cause();
      } catch (const entail::SolverNotFound&) {
        throw;
      } catch (const entail::SolverProtocolError&) {
        throw;
      } catch (const std::runtime_error& e) {
        // Propagation limits or brute-force guards on the patched program.
        a.verdict = AttemptVerdict::FailedVerification;
        a.rejection = e.what();
      }

      const bool fixed = a.verdict == AttemptVerdict::Verified;
      if (a.candidate && !fixed) rejected.push_back(*a.candidate);
      if (fixed) {
        outcome.patches.push_back(Patch{line, *a.candidate});
        if (outcome.patches.size() == 1) outcome.attempts_to_first_fix = static_cast<int>(outcome.attempts.size()) + 1;
      }
      outcome.attempts.push_back(std::move(a));
      if (fixed) break;
    }
    if (options.stop_at_first && !outcome.patches.empty()) break;
  }
  outcome.status = outcome.patches.empty() ? RepairStatus::Unfixable : RepairStatus::Fixed;
  return outcome;
}

void write_transcript(const std::filesystem::path& path, const std::string& model, const RepairOutcome& outcome) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  for (const auto& a : outcome.attempts) {
    serialize::Json j = serialize::to_json(a);
    j["model"] = model;
    out << j.dump() << "\n";
  }
}

}  // namespace hoarefix::repair

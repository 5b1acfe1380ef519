#include <algorithm>
#include <map>
#include <set>

#include "hoarefix/faultloc.hpp"

namespace hoarefix::faultloc {

namespace {

bool ranks_before(const SuspiciousLine& a, const SuspiciousLine& b) {
  if (a.failed != b.failed) return a.failed > b.failed;
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.line < b.line;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

SuspiciousReport localize(const lang::Method& m, const hoare::Analysis& analysis,
                          const entail::VerificationResult& result) {
  if (analysis.method != m.name || result.method != m.name) {
    throw MismatchedInputs("analysis of '" + analysis.method + "' and verdicts of '" + result.method +
                           "' do not belong to method '" + m.name + "'");
  }
  if (result.verdicts.size() != analysis.entailments.size()) {
    throw MismatchedInputs("verdict count does not match entailment count for '" + m.name + "'");
  }

  std::map<int, SuspiciousLine> flagged;
  for (const auto& e : analysis.entailments) {
    auto v = result.verdicts.find(e.id);
    if (v == result.verdicts.end()) throw MismatchedInputs("no verdict for entailment " + std::to_string(e.id));
    if (v->second.status == entail::Status::Valid) continue;

    std::set<int> lines;
    for (const auto& c : e.hypothesis) {
      if (c.origin) lines.insert(*c.origin);
    }
    if (lines.empty()) lines.insert(e.path.begin(), e.path.end());  // whole block

    for (int line : lines) {
      auto [it, fresh] = flagged.try_emplace(line);
      SuspiciousLine& s = it->second;
      const int distance = e.control_point - line;
      if (fresh) {
        s.line = line;
        s.distance = distance;
      } else {
        s.distance = std::min(s.distance, distance);
      }
      ++s.failed;
      s.entailments.push_back(e.id);
    }
  }

  SuspiciousReport report;
  report.method = m.name;
  for (auto& [line, s] : flagged) report.lines.push_back(std::move(s));
  std::sort(report.lines.begin(), report.lines.end(), ranks_before);
  report.coverage = percent(report.lines.size(), m.statement_lines().size());
  return report;
}

SuspiciousReport merge(const std::vector<SuspiciousReport>& reports, std::size_t statement_lines) {
  SuspiciousReport out;
  for (const auto& r : reports) {
    if (!out.method.empty() && !r.method.empty()) out.method += ",";
    out.method += r.method;
    out.lines.insert(out.lines.end(), r.lines.begin(), r.lines.end());
  }
  std::sort(out.lines.begin(), out.lines.end(), ranks_before);
  out.coverage = percent(out.lines.size(), statement_lines);
  return out;
}

SuspiciousReport localize_program(const lang::Program& p, const entail::ProgramVerification& v) {
  if (v.analyses.size() != p.methods.size() || v.results.size() != p.methods.size()) {
    throw MismatchedInputs("verification does not cover every method of the program");
  }
  std::vector<SuspiciousReport> reports;
  std::size_t statements = 0;
  for (std::size_t i = 0; i < p.methods.size(); ++i) {
    reports.push_back(localize(p.methods[i], v.analyses[i], v.results[i]));
    statements += p.methods[i].statement_lines().size();
  }
  if (reports.size() == 1) return reports.front();
  return merge(reports, statements);
}

bool topn_hit(const SuspiciousReport& report, int true_line, std::size_t n) {
  const std::size_t r = rank_of(report, true_line);
  return r != 0 && r <= n;
}

std::size_t rank_of(const SuspiciousReport& report, int line) {
  for (std::size_t i = 0; i < report.lines.size(); ++i) {
    if (report.lines[i].line == line) return i + 1;
  }
  return 0;
}

}  // namespace hoarefix::faultloc

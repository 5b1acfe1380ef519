#include "hoarefix/serialize.hpp"

namespace hoarefix::serialize {

Json to_json(const entail::Verdict& v) {
  Json j;
  j["status"] = entail::to_string(v.status);
  if (v.counterexample) {
    Json m = Json::object();
    for (const auto& [k, x] : *v.counterexample) m[k] = x;
    j["counterexample"] = std::move(m);
  }
  j["elapsed_ms"] = v.elapsed_ms;
  return j;
}

Json to_json(const hoare::Analysis& analysis, const entail::VerificationResult& result) {
  Json j;
  j["method"] = analysis.method;
  j["verified"] = result.verified;
  j["entailments"] = Json::array();
  for (const auto& e : analysis.entailments) {
    Json x;
    x["id"] = e.id;
    x["kind"] = hoare::to_string(e.kind);
    x["control_point"] = e.control_point;
    x["clause_line"] = e.clause_line;
    x["formula"] = e.to_string();
    auto it = result.verdicts.find(e.id);
    if (it != result.verdicts.end()) x["verdict"] = to_json(it->second);
    j["entailments"].push_back(std::move(x));
  }
  j["warnings"] = analysis.warnings;
  return j;
}

Json to_json(const entail::Disagreement& d) {
  return Json{{"method", d.method},
              {"id", d.id},
              {"smt", entail::to_string(d.smt)},
              {"brute", entail::to_string(d.brute)}};
}

Json to_json(const faultloc::SuspiciousReport& report) {
  Json j;
  j["method"] = report.method;
  j["coverage"] = report.coverage;
  j["lines"] = Json::array();
  for (const auto& s : report.lines) {
    j["lines"].push_back(Json{{"line", s.line},
                              {"failed", s.failed},
                              {"distance", s.distance},
                              {"entailments", s.entailments}});
  }
  return j;
}

Json to_json(const repair::Prompt& p) {
  return Json{{"system", p.system}, {"user", p.user}, {"max_tokens", p.max_tokens}, {"temperature", p.temperature}};
}

Json to_json(const repair::RepairAttempt& a) {
  Json j;
  j["line"] = a.line;
  j["attempt"] = a.attempt;
  j["prompt"] = to_json(a.prompt);
  j["raw"] = a.raw;
  j["candidate"] = a.candidate ? Json(*a.candidate) : Json(nullptr);
  j["rejection"] = a.rejection;
  j["verdict"] = repair::to_string(a.verdict);
  return j;
}

Json to_json(const repair::RepairOutcome& o) {
  Json j;
  j["status"] = repair::to_string(o.status);
  j["complete"] = o.complete;
  if (!o.error.empty()) j["error"] = o.error;
  j["attempts_to_first_fix"] = o.attempts_to_first_fix;
  j["patches"] = Json::array();
  for (const auto& p : o.patches) j["patches"].push_back(Json{{"line", p.line}, {"text", p.text}});
  j["attempts"] = Json::array();
  for (const auto& a : o.attempts) {
    Json x = to_json(a);
    x.erase("prompt");
    j["attempts"].push_back(std::move(x));
  }
  return j;
}

}  // namespace hoarefix::serialize

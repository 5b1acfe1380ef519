#pragma once

#include <json.hpp>

#include "hoarefix/entail.hpp"
#include "hoarefix/faultloc.hpp"
#include "hoarefix/hoare.hpp"
#include "hoarefix/repair.hpp"

namespace hoarefix::serialize {

using Json = nlohmann::ordered_json;

Json to_json(const entail::Verdict& v);
/// One object per entailment, in numeric id order.
Json to_json(const hoare::Analysis& analysis, const entail::VerificationResult& result);
Json to_json(const entail::Disagreement& d);
Json to_json(const faultloc::SuspiciousReport& report);
Json to_json(const repair::Prompt& p);
Json to_json(const repair::RepairAttempt& a);
Json to_json(const repair::RepairOutcome& o);

}  // namespace hoarefix::serialize

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "hoarefix/entail.hpp"

namespace hoarefix::entail {

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Smt: return "smt";
    case Backend::Brute: return "brute";
    case Backend::Both: return "both";
  }
  return "?";
}

std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "smt") return Backend::Smt;
  if (s == "brute") return Backend::Brute;
  if (s == "both") return Backend::Both;
  return std::nullopt;
}

Verdict discharge(const hoare::Entailment& e, const BackendOptions& options, const std::string& method,
                  std::vector<Disagreement>* disagreements) {
  switch (options.backend) {
    case Backend::Smt: return check_smt(e, options.solver);
    case Backend::Brute: return check_bruteforce(e, options.bound);
    case Backend::Both: break;
  }
  Verdict smt = check_smt(e, options.solver);
  if (enumerated_symbols(e).size() <= kAgreementSymbolLimit) {
    const Verdict brute = check_bruteforce(e, options.bound);
    if (brute.status == Status::Invalid && smt.status != Status::Invalid && disagreements) {
      disagreements->push_back(Disagreement{method, e.id, smt.status, brute.status});
    }
  }
  return smt;
}

VerificationResult discharge_all(const hoare::Analysis& analysis, const BackendOptions& options) {
  VerificationResult result;
  result.method = analysis.method;
  const auto& es = analysis.entailments;
  std::vector<Verdict> verdicts(es.size());
  std::vector<std::vector<Disagreement>> found(es.size());

  const unsigned workers = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(es.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < es.size(); ++i) verdicts[i] = discharge(es[i], options, analysis.method, &found[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < es.size(); i = next++) {
            try {
              verdicts[i] = discharge(es[i], options, analysis.method, &found[i]);
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  result.verified = true;
  for (std::size_t i = 0; i < es.size(); ++i) {
    result.verified = result.verified && verdicts[i].status == Status::Valid;
    result.verdicts.emplace(es[i].id, std::move(verdicts[i]));
    for (auto& d : found[i]) result.disagreements.push_back(std::move(d));
  }
  return result;
}

VerificationResult verify_method(const lang::Method& m, const BackendOptions& options) {
  return discharge_all(hoare::propagate(m), options);
}

bool ProgramVerification::verified() const {
  for (const auto& r : results) {
    if (!r.verified) return false;
  }
  return true;
}

ProgramVerification verify_program(const lang::Program& p, const BackendOptions& options) {
  ProgramVerification out;
  for (const auto& m : p.methods) {
    out.analyses.push_back(hoare::propagate(m));
    out.results.push_back(discharge_all(out.analyses.back(), options));
  }
  return out;
}

}  // namespace hoarefix::entail

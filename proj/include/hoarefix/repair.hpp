#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoarefix/entail.hpp"
#include "hoarefix/faultloc.hpp"
#include "hoarefix/lang.hpp"

namespace hoarefix::repair {

/// System instruction sent with every query.
extern const std::string kSystemPrompt;
inline constexpr std::string_view kUserSuffix = "\nfixed line: \n";
inline constexpr int kMaxAttemptsPerLine = 3;

struct Prompt {
  std::string system;
  std::string user;
  int max_tokens = 30;
  double temperature = 0.2;
};

class LineNotFound : public std::invalid_argument {
 public:
  explicit LineNotFound(int line);
};

/// The enclosing method's source with `line` marked. Candidates in
/// `rejected` are listed as already-failed fixes before the suffix.
Prompt build_prompt(const lang::Program& p, int line, const std::vector<std::string>& rejected = {});

/// Line carrying the marker in a prompt's user text, without the marker.
std::optional<std::string> marked_line(std::string_view user_text);
/// Candidates listed as already rejected in a prompt's user text.
std::vector<std::string> rejected_candidates(std::string_view user_text);

class EmptyResponse : public std::runtime_error {
 public:
  explicit EmptyResponse(const std::string& reason) : std::runtime_error(reason) {}
};

/// First statement-like line of a model response, with wrappers, labels and
/// trailing comments removed. Throws EmptyResponse when nothing usable remains.
std::string sanitize_response(std::string_view raw);

class ModelUnavailable : public std::runtime_error {
 public:
  explicit ModelUnavailable(const std::string& detail) : std::runtime_error("model unavailable: " + detail) {}
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string name() const = 0;
  /// Raw completion text. Throws ModelUnavailable on transport failure.
  virtual std::string complete(const Prompt& prompt) = 0;
};

/// Replacement lines for `line_text` in a fixed order: operator flips, sign
/// toggles, constant adjustments, then two-variable swaps.
std::vector<std::string> mock_candidates(std::string_view line_text);

/// Offline model answering from mock_candidates, skipping candidates the
/// prompt lists as rejected. Deterministic and stateless.
class MockModel : public ModelClient {
 public:
  std::string name() const override { return "mock"; }
  std::string complete(const Prompt& prompt) override;
};

struct HttpModelConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "OPENAI_API_KEY";
  unsigned max_in_flight = 1;
  int timeout_s = 60;
  int retries = 2;
};

class MissingApiKey : public std::runtime_error {
 public:
  explicit MissingApiKey(const std::string& var) : std::runtime_error("environment variable " + var + " is not set") {}
};

/// OpenAI-compatible chat completion client. The key is read from the
/// environment once, at construction.
class HttpChatModel : public ModelClient {
 public:
  explicit HttpChatModel(HttpModelConfig config);
  ~HttpChatModel() override;
  std::string name() const override { return config_.model; }
  std::string complete(const Prompt& prompt) override;

 private:
  struct State;
  HttpModelConfig config_;
  std::string api_key_;
  std::unique_ptr<State> state_;
};

enum class AttemptVerdict { Verified, FailedVerification, Unparseable };
std::string_view to_string(AttemptVerdict v);

struct RepairAttempt {
  int line = 0;
  int attempt = 0;  // 1..3
  Prompt prompt;
  std::string raw;
  std::optional<std::string> candidate;
  std::string rejection;
  AttemptVerdict verdict = AttemptVerdict::Unparseable;
};

struct Patch {
  int line = 0;
  std::string text;
  bool operator==(const Patch&) const = default;
};

enum class RepairStatus { Fixed, Unfixable };
std::string_view to_string(RepairStatus s);

struct RepairOutcome {
  std::vector<RepairAttempt> attempts;
  std::vector<Patch> patches;
  RepairStatus status = RepairStatus::Unfixable;
  /// Attempts made up to and including the one producing the first patch.
  int attempts_to_first_fix = 0;
  bool complete = true;
  std::string error;
};

struct RepairOptions {
  entail::BackendOptions backend;
  int max_tokens = 30;
  double temperature = 0.2;
  /// Stop after the first validated patch instead of visiting every line.
  bool stop_at_first = false;
};

RepairOutcome repair_loop(const lang::Program& p, const faultloc::SuspiciousReport& report, ModelClient& model,
                          const RepairOptions& options);

/// One JSON object per attempt.
void write_transcript(const std::filesystem::path& path, const std::string& model, const RepairOutcome& outcome);

}  // namespace hoarefix::repair

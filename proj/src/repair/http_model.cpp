#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <semaphore>
#include <thread>

#include "hoarefix/repair.hpp"

namespace hoarefix::repair {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix, no trailing slash
};

Endpoint split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ModelUnavailable("base URL needs a scheme: " + url);
  const std::size_t slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

struct HttpChatModel::State {
  explicit State(unsigned n) : slots(static_cast<std::ptrdiff_t>(n)) {}
  std::counting_semaphore<1024> slots;
};

HttpChatModel::HttpChatModel(HttpModelConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) throw MissingApiKey(config_.api_key_env);
  api_key_ = key;
  state_ = std::make_unique<State>(std::clamp(config_.max_in_flight, 1u, 1024u));
}

HttpChatModel::~HttpChatModel() = default;

std::string HttpChatModel::complete(const Prompt& prompt) {
  const Endpoint ep = split_url(config_.base_url);
  nlohmann::json body = {
      {"model", config_.model},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", prompt.system}},
                              {{"role", "user"}, {"content", prompt.user}}})},
      {"max_tokens", prompt.max_tokens},
      {"temperature", prompt.temperature},
  };
  const std::string payload = body.dump();

  state_->slots.acquire();
  struct Release {
    State* s;
    ~Release() { s->slots.release(); }
  } release{state_.get()};

  std::string failure;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
    httplib::Client client(ep.origin);
    client.set_connection_timeout(config_.timeout_s, 0);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_write_timeout(config_.timeout_s, 0);
    httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};
    auto res = client.Post(ep.path + "/chat/completions", headers, payload, "application/json");
    if (!res) {
      failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      failure = "HTTP " + std::to_string(res->status);
      if (transient(res->status)) continue;
      throw ModelUnavailable(failure);
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      const auto& content = reply.at("choices").at(0).at("message").at("content");
      return content.is_null() ? std::string() : content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ModelUnavailable(std::string("malformed completion: ") + e.what());
    }
  }
  throw ModelUnavailable(failure);
}

}  // namespace hoarefix::repair

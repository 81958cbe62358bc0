#include "llmcg/http_provider.hpp"

#include "llmcg/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

namespace llmcg {
namespace {

using nlohmann::json;

bool is_transient(int status) {
  return status == 0 || status == 408 || status == 429 || (status >= 500 && status <= 599);
}

}  // namespace

Clock steady_clock_seconds() {
  return [] {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
  };
}

Sleeper thread_sleeper() {
  return [](double seconds) {
    if (seconds > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

TokenBucket::TokenBucket(double requests_per_minute, double burst, Clock clock, Sleeper sleeper)
    : rate_per_second_(requests_per_minute / 60.0),
      capacity_(std::max(1.0, burst)),
      clock_(std::move(clock)),
      sleeper_(std::move(sleeper)),
      tokens_(capacity_),
      last_refill_(clock_()) {}

void TokenBucket::acquire() {
  if (rate_per_second_ <= 0.0) return;
  double wait = 0.0;
  {
    std::lock_guard lock(mutex_);
    const double now = clock_();
    tokens_ = std::min(capacity_, tokens_ + (now - last_refill_) * rate_per_second_);
    last_refill_ = now;
    tokens_ -= 1.0;
    if (tokens_ < 0.0) wait = -tokens_ / rate_per_second_;
  }
  if (wait > 0.0) sleeper_(wait);
}

double backoff_ceiling(const ProviderConfig& config, int attempt) {
  const double grown = config.retry_base_delay_seconds * std::ldexp(1.0, std::min(attempt, 30));
  return std::min(config.retry_max_delay_seconds, grown);
}

HttpChatProvider::HttpChatProvider(std::shared_ptr<HttpTransport> transport,
                                   std::shared_ptr<TokenBucket> limiter)
    : HttpChatProvider(std::move(transport), std::move(limiter), Hooks{}) {}

HttpChatProvider::HttpChatProvider(std::shared_ptr<HttpTransport> transport,
                                   std::shared_ptr<TokenBucket> limiter, Hooks hooks)
    : transport_(std::move(transport)),
      limiter_(std::move(limiter)),
      hooks_(std::move(hooks)),
      rng_(hooks_.jitter_seed) {}

std::string HttpChatProvider::request_body(const RenderedPrompt& prompt,
                                           const ProviderConfig& config) {
  json messages = json::array();
  if (!prompt.system_text.empty()) {
    messages.push_back({{"role", "system"}, {"content", prompt.system_text}});
  }
  messages.push_back({{"role", "user"}, {"content", prompt.user_text}});
  return json{{"model", config.model_name},
              {"temperature", config.temperature},
              {"messages", std::move(messages)}}
      .dump();
}

std::string HttpChatProvider::reply_content(const std::string& response_body) {
  try {
    const json document = json::parse(response_body);
    const json& content = document.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorCode::MalformedProviderResponse, "null content");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedProviderResponse, e.what());
  }
}

double HttpChatProvider::jitter(double ceiling) {
  std::lock_guard lock(rng_mutex_);
  return std::uniform_real_distribution<double>(0.0, ceiling)(rng_);
}

ProviderReply HttpChatProvider::send(const RenderedPrompt& prompt, const ProviderConfig& config) {
  HttpRequest request;
  request.url = config.endpoint_url;
  request.body = request_body(prompt, config);
  request.timeout_seconds = config.request_timeout_seconds;
  request.headers.emplace_back("Content-Type", "application/json");
  if (!config.api_key_env.empty()) {
    const char* key = hooks_.getenv(config.api_key_env.c_str());
    if (key != nullptr && *key != '\0') {
      request.headers.emplace_back("Authorization", std::string("Bearer ") + key);
    }
  }

  const double started = hooks_.clock();
  std::string last_failure;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) hooks_.sleeper(jitter(backoff_ceiling(config, attempt - 1)));
    if (limiter_) limiter_->acquire();

    const HttpResponse response = transport_->post(request);
    if (response.status >= 200 && response.status < 300) {
      return {reply_content(response.body), std::max(0.0, hooks_.clock() - started),
              ExchangeSource::Live, attempt};
    }
    if (response.status == 401 || response.status == 403) {
      throw Error(ErrorCode::AuthError, "provider rejected the credential (HTTP " +
                                            std::to_string(response.status) + ")");
    }
    last_failure = response.status == 0 ? "transport error: " + response.error
                                        : "HTTP " + std::to_string(response.status);
    if (!is_transient(response.status)) {
      throw Error(ErrorCode::RequestRejected, last_failure + ": " + response.body.substr(0, 200));
    }
  }
  throw Error(ErrorCode::ProviderUnavailable,
              "giving up after " + std::to_string(config.max_retries + 1) + " attempts (" +
                  last_failure + ")");
}

}  // namespace llmcg

#pragma once

#include "llmcg/gateway.hpp"

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace llmcg {

struct HttpRequest {
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  double timeout_seconds = 60.0;
};

struct HttpResponse {
  int status = 0;  // 0: transport failure (connect error, timeout)
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; supports http:// and https:// URLs.
std::shared_ptr<HttpTransport> make_httplib_transport();

using Clock = std::function<double()>;          // seconds, monotonic
using Sleeper = std::function<void(double)>;    // seconds

Clock steady_clock_seconds();
Sleeper thread_sleeper();

/// Token bucket shared by all concurrent requests. Callers that find the
/// bucket empty reserve a token and sleep for their deficit.
class TokenBucket {
 public:
  TokenBucket(double requests_per_minute, double burst, Clock clock = steady_clock_seconds(),
              Sleeper sleeper = thread_sleeper());

  void acquire();

 private:
  double rate_per_second_;
  double capacity_;
  Clock clock_;
  Sleeper sleeper_;
  std::mutex mutex_;
  double tokens_;
  double last_refill_;
};

/// Upper bound for the delay before retry number `attempt` (0-based):
/// min(max_delay, base_delay * 2^attempt). The actual delay is drawn
/// uniformly from [0, bound] (full jitter).
double backoff_ceiling(const ProviderConfig& config, int attempt);

/// OpenAI-compatible chat-completions client. Retries timeouts, 408, 429 and
/// 5xx responses with exponential backoff and full jitter; never retries
/// authentication failures.
class HttpChatProvider : public ChatProvider {
 public:
  struct Hooks {
    Clock clock = steady_clock_seconds();
    Sleeper sleeper = thread_sleeper();
    std::function<const char*(const char*)> getenv = [](const char* name) {
      return std::getenv(name);
    };
    std::uint64_t jitter_seed = std::random_device{}();
  };

  HttpChatProvider(std::shared_ptr<HttpTransport> transport, std::shared_ptr<TokenBucket> limiter);
  HttpChatProvider(std::shared_ptr<HttpTransport> transport, std::shared_ptr<TokenBucket> limiter,
                   Hooks hooks);

  ProviderReply send(const RenderedPrompt& prompt, const ProviderConfig& config) override;

  static std::string request_body(const RenderedPrompt& prompt, const ProviderConfig& config);
  static std::string reply_content(const std::string& response_body);

 private:
  double jitter(double ceiling);

  std::shared_ptr<HttpTransport> transport_;
  std::shared_ptr<TokenBucket> limiter_;
  Hooks hooks_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

}  // namespace llmcg

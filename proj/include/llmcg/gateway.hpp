#pragma once

#include "llmcg/prompt.hpp"

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace llmcg {

class ResponseCache;

struct ProviderConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4-turbo";
  double temperature = 0.0;
  int max_retries = 3;
  double request_timeout_seconds = 120.0;
  int parallelism = 1;
  std::filesystem::path cache_dir;  // empty disables caching
  std::string api_key_env = "OPENAI_API_KEY";
  double requests_per_minute = 30.0;  // 0 disables rate limiting
  double rate_limit_burst = 5.0;
  double retry_base_delay_seconds = 1.0;
  double retry_max_delay_seconds = 30.0;

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;
};

enum class ExchangeSource { Live, Cache, Replay };

std::string_view to_string(ExchangeSource source);

struct ChatExchange {
  RenderedPrompt prompt;
  std::string reply_text;
  std::string model_name;
  double latency_seconds = 0.0;
  ExchangeSource source = ExchangeSource::Live;
  int retries = 0;
};

struct ProviderReply {
  std::string reply_text;
  double latency_seconds = 0.0;
  ExchangeSource source = ExchangeSource::Live;
  int retries = 0;
};

/// Something that answers rendered prompts. Implementations must be safe to
/// call from several threads at once.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ProviderReply send(const RenderedPrompt& prompt, const ProviderConfig& config) = 0;
};

/// Counts calls forwarded to the wrapped provider.
class CountingProvider : public ChatProvider {
 public:
  explicit CountingProvider(std::shared_ptr<ChatProvider> inner) : inner_(std::move(inner)) {}

  ProviderReply send(const RenderedPrompt& prompt, const ProviderConfig& config) override;

  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::shared_ptr<ChatProvider> inner_;
  std::atomic<std::size_t> calls_{0};
};

/// Thread-safe collector of exchanges, installable as a Gateway observer so a
/// replay fixture can be written after a run.
class ExchangeRecorder {
 public:
  void operator()(const ChatExchange& exchange);
  std::vector<ChatExchange> exchanges() const;

 private:
  mutable std::mutex mutex_;
  std::vector<ChatExchange> exchanges_;
};

using ExchangeObserver = std::function<void(const ChatExchange&)>;

class Gateway {
 public:
  Gateway(ProviderConfig config, std::shared_ptr<ChatProvider> provider,
          std::shared_ptr<ResponseCache> cache = nullptr);

  const ProviderConfig& config() const noexcept { return config_; }

  /// Called with every exchange returned by complete() or cached_complete(),
  /// possibly from several threads at once.
  void set_observer(ExchangeObserver observer) { observer_ = std::move(observer); }

  /// Always asks the provider.
  ChatExchange complete(const RenderedPrompt& prompt);

  /// Serves from the cache when possible; otherwise completes and stores.
  /// Concurrent calls with the same key reach the provider once.
  ChatExchange cached_complete(const RenderedPrompt& prompt);

 private:
  std::mutex& key_mutex(const std::string& key);
  ChatExchange observed(ChatExchange exchange) const;

  ProviderConfig config_;
  std::shared_ptr<ChatProvider> provider_;
  std::shared_ptr<ResponseCache> cache_;
  ExchangeObserver observer_;
  std::mutex keys_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> key_mutexes_;
};

}  // namespace llmcg

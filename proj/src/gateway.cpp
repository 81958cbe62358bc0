#include "llmcg/gateway.hpp"

#include "llmcg/cache.hpp"
#include "llmcg/error.hpp"

namespace llmcg {

void ProviderConfig::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "temperature must lie in [0, 2]");
  }
  if (max_retries < 0) throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (parallelism < 1) throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
  if (!(request_timeout_seconds > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "request timeout must be positive");
  }
  if (requests_per_minute < 0.0 || rate_limit_burst < 1.0) {
    throw Error(ErrorCode::InvalidConfig, "invalid rate limit");
  }
  if (retry_base_delay_seconds < 0.0 || retry_max_delay_seconds < retry_base_delay_seconds) {
    throw Error(ErrorCode::InvalidConfig, "invalid retry delays");
  }
  if (model_name.empty()) throw Error(ErrorCode::InvalidConfig, "model name is empty");
}

std::string_view to_string(ExchangeSource source) {
  switch (source) {
    case ExchangeSource::Live: return "live";
    case ExchangeSource::Cache: return "cache";
    case ExchangeSource::Replay: return "replay";
  }
  return "live";
}

ProviderReply CountingProvider::send(const RenderedPrompt& prompt, const ProviderConfig& config) {
  ++calls_;
  return inner_->send(prompt, config);
}

void ExchangeRecorder::operator()(const ChatExchange& exchange) {
  std::lock_guard lock(mutex_);
  exchanges_.push_back(exchange);
}

std::vector<ChatExchange> ExchangeRecorder::exchanges() const {
  std::lock_guard lock(mutex_);
  return exchanges_;
}

Gateway::Gateway(ProviderConfig config, std::shared_ptr<ChatProvider> provider,
                 std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)), provider_(std::move(provider)), cache_(std::move(cache)) {
  config_.validate();
  if (!provider_) throw Error(ErrorCode::InvalidConfig, "gateway without a provider");
}

ChatExchange Gateway::complete(const RenderedPrompt& prompt) {
  ProviderReply reply = provider_->send(prompt, config_);
  return observed({prompt,
                   std::move(reply.reply_text),
                   config_.model_name,
                   reply.latency_seconds < 0.0 ? 0.0 : reply.latency_seconds,
                   reply.source,
                   reply.retries});
}

ChatExchange Gateway::cached_complete(const RenderedPrompt& prompt) {
  if (!cache_) return complete(prompt);
  const std::string key = ResponseCache::key_for(prompt, config_);
  std::lock_guard lock(key_mutex(key));
  if (auto hit = cache_->lookup(key)) {
    return observed({prompt, std::move(hit->reply_text), config_.model_name,
                     hit->latency_seconds, ExchangeSource::Cache, 0});
  }
  ChatExchange exchange = complete(prompt);
  cache_->store(key, prompt, config_, {exchange.reply_text, exchange.latency_seconds});
  return exchange;
}

ChatExchange Gateway::observed(ChatExchange exchange) const {
  if (observer_) observer_(exchange);
  return exchange;
}

std::mutex& Gateway::key_mutex(const std::string& key) {
  std::lock_guard lock(keys_mutex_);
  auto& slot = key_mutexes_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

}  // namespace llmcg

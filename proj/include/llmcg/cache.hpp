#pragma once

#include "llmcg/gateway.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace llmcg {

struct CachedReply {
  std::string reply_text;
  double latency_seconds = 0.0;
};

struct CacheStats {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
};

/// One JSON file per key under a directory. Keys combine the prompt
/// fingerprint, model name and temperature. Every entry carries a checksum;
/// entries failing it are reported and treated as misses.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path directory);

  const std::filesystem::path& directory() const noexcept { return directory_; }

  static std::string key_for(const RenderedPrompt& prompt, const ProviderConfig& config);
  std::filesystem::path entry_path(const std::string& key) const;

  std::optional<CachedReply> lookup(const std::string& key) const;
  void store(const std::string& key, const RenderedPrompt& prompt, const ProviderConfig& config,
             const CachedReply& reply) const;

  CacheStats stats() const;
  /// Removes every entry. Throws CacheLocked while another process holds the run lock.
  std::size_t clear() const;

 private:
  std::filesystem::path directory_;
};

/// Advisory lock file guarding a cache directory against concurrent mutating
/// commands. A lock left by a dead process is taken over.
class CacheLock {
 public:
  explicit CacheLock(const std::filesystem::path& directory);
  ~CacheLock();

  CacheLock(const CacheLock&) = delete;
  CacheLock& operator=(const CacheLock&) = delete;

  static std::filesystem::path lock_path(const std::filesystem::path& directory);

 private:
  std::filesystem::path path_;
};

}  // namespace llmcg

#include "llmcg/cache.hpp"

#include "llmcg/error.hpp"
#include "llmcg/log.hpp"
#include "llmcg/text.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <fcntl.h>
#include <unistd.h>

namespace llmcg {
namespace {

using nlohmann::json;

constexpr std::string_view kEntrySuffix = ".json";
constexpr std::string_view kLockName = ".llmcg.lock";

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string entry_checksum(const std::string& key, const std::string& reply, double latency) {
  return sha256_hex(key + '\n' + format_number(latency) + '\n' + reply);
}

bool is_entry(const std::filesystem::directory_entry& entry) {
  const auto name = entry.path().filename().string();
  return entry.is_regular_file() && name.size() > kEntrySuffix.size() &&
         name.ends_with(kEntrySuffix) && name.front() != '.';
}

bool process_alive(pid_t pid) {
  if (pid <= 0) return false;
  return ::kill(pid, 0) == 0 || errno != ESRCH;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create cache directory " + directory_.string());
}

std::string ResponseCache::key_for(const RenderedPrompt& prompt, const ProviderConfig& config) {
  char temperature[32];
  std::snprintf(temperature, sizeof temperature, "%.6f", config.temperature);
  return prompt.fingerprint + '|' + config.model_name + '|' + temperature;
}

std::filesystem::path ResponseCache::entry_path(const std::string& key) const {
  return directory_ / (sha256_hex(key) + std::string(kEntrySuffix));
}

std::optional<CachedReply> ResponseCache::lookup(const std::string& key) const {
  const auto path = entry_path(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const json entry = json::parse(read_file(path));
    CachedReply reply{entry.at("reply_text").get<std::string>(),
                      entry.at("latency_seconds").get<double>()};
    if (entry.at("key").get<std::string>() != key ||
        entry.at("checksum").get<std::string>() !=
            entry_checksum(key, reply.reply_text, reply.latency_seconds)) {
      throw Error(ErrorCode::CacheCorrupt, "checksum mismatch");
    }
    return reply;
  } catch (const std::exception& e) {
    warn("CacheCorrupt: ignoring cache entry " + path.filename().string() + " (" + e.what() +
         ")");
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const RenderedPrompt& prompt,
                          const ProviderConfig& config, const CachedReply& reply) const {
  const json entry = {
      {"key", key},
      {"fingerprint", prompt.fingerprint},
      {"model_name", config.model_name},
      {"temperature", config.temperature},
      {"reply_text", reply.reply_text},
      {"latency_seconds", reply.latency_seconds},
      {"checksum", entry_checksum(key, reply.reply_text, reply.latency_seconds)},
  };
  write_file_atomic(entry_path(key), entry.dump(2) + "\n");
}

CacheStats ResponseCache::stats() const {
  CacheStats stats;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(directory_, ec)) {
    if (!is_entry(entry)) continue;
    ++stats.entries;
    stats.bytes += entry.file_size();
  }
  return stats;
}

std::size_t ResponseCache::clear() const {
  CacheLock lock(directory_);
  std::vector<std::filesystem::path> doomed;
  for (const auto& entry : std::filesystem::directory_iterator(directory_)) {
    if (is_entry(entry)) doomed.push_back(entry.path());
  }
  for (const auto& path : doomed) std::filesystem::remove(path);
  return doomed.size();
}

std::filesystem::path CacheLock::lock_path(const std::filesystem::path& directory) {
  return directory / std::string(kLockName);
}

CacheLock::CacheLock(const std::filesystem::path& directory) : path_(lock_path(directory)) {
  std::filesystem::create_directories(directory);
  for (int attempt = 0; attempt < 2; ++attempt) {
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd >= 0) {
      const std::string pid = std::to_string(::getpid()) + "\n";
      [[maybe_unused]] auto written = ::write(fd, pid.data(), pid.size());
      ::close(fd);
      return;
    }
    if (errno != EEXIST) throw Error(ErrorCode::Io, "cannot create " + path_.string());

    pid_t owner = 0;
    try {
      owner = static_cast<pid_t>(std::stol(read_file(path_)));
    } catch (const std::exception&) {
      owner = 0;
    }
    if (owner == ::getpid() || process_alive(owner)) {
      throw Error(ErrorCode::CacheLocked, "cache directory is locked by process " +
                                              std::to_string(owner) + " (" + path_.string() + ")");
    }
    warn("removing stale cache lock left by process " + std::to_string(owner));
    std::filesystem::remove(path_);
  }
  throw Error(ErrorCode::CacheLocked, "could not acquire " + path_.string());
}

CacheLock::~CacheLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

}  // namespace llmcg

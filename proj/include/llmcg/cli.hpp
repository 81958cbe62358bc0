#pragma once

#include "llmcg/gateway.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace llmcg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

enum class Mode { Live, Replay, Record };

struct CliConfig {
  ProviderConfig provider;
  Mode mode = Mode::Live;
  std::filesystem::path fixture_path;  // Replay or Record
  bool strict_replay = true;
  bool use_cache = true;
  std::size_t entity_cap = 20;
  bool enforce_acyclic = false;
  std::filesystem::path output_dir = ".";
  std::string domain_hint = "medical";  // "" disables the emphasis line

  CliConfig();

  /// Throws InvalidConfig.
  void validate() const;
};

/// Settings given on the command line. Unset fields fall back to the
/// environment, then the config file, then the defaults.
struct CliFlags {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> record;
  std::optional<std::string> model;
  std::optional<std::string> endpoint;
  std::optional<std::string> api_key_env;
  std::optional<std::filesystem::path> cache_dir;
  std::optional<double> temperature;
  std::optional<int> max_retries;
  std::optional<double> timeout;
  std::optional<double> rpm;
  std::optional<int> parallelism;
  std::optional<std::size_t> entity_cap;
  std::optional<bool> enforce_acyclic;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::string> domain_hint;
  std::optional<bool> non_strict;
  std::optional<bool> no_cache;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads from the process environment.
EnvLookup process_environment();

/// Merges flags > environment (LLMCG_* variables) > config file > defaults.
/// Throws InvalidConfig on malformed values.
CliConfig resolve_config(const CliFlags& flags, const EnvLookup& env);

/// Environment variable and config-file key for each setting, in the order
/// documented for users.
struct SettingName {
  const char* flag;
  const char* env;
  const char* config_key;
};
const std::vector<SettingName>& setting_names();

int cmd_extract(const CliConfig& config, const std::vector<std::filesystem::path>& inputs,
                std::ostream& out, std::ostream& err);
int cmd_eval_pairs(const CliConfig& config, const std::filesystem::path& semeval_path,
                   std::ostream& out, std::ostream& err);
int cmd_eval_graph(const CliConfig& config, const std::filesystem::path& run_path,
                   const std::filesystem::path& truth_path, std::ostream& out, std::ostream& err);
int cmd_orient(const CliConfig& config, const std::filesystem::path& pdag_path,
               const std::filesystem::path& text_path, std::ostream& out, std::ostream& err);

enum class CacheAction { Stats, Clear };
int cmd_cache(const CliConfig& config, CacheAction action, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches. Returns 0, 1 or 2.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_environment());

}  // namespace llmcg::cli

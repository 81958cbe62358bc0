#include "llmcg/cli.hpp"

#include "llmcg/analysis.hpp"
#include "llmcg/cache.hpp"
#include "llmcg/error.hpp"
#include "llmcg/evaluation.hpp"
#include "llmcg/fixture.hpp"
#include "llmcg/graph_io.hpp"
#include "llmcg/http_provider.hpp"
#include "llmcg/pipeline.hpp"
#include "llmcg/semeval.hpp"
#include "llmcg/text.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>

namespace llmcg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

enum class ValueType { Text, Real, Integer, Boolean };

struct Setting {
  SettingName name;
  ValueType type;
};

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {{"--model", "LLMCG_MODEL", "model"}, ValueType::Text},
      {{"--endpoint", "LLMCG_ENDPOINT", "endpoint"}, ValueType::Text},
      {{"--api-key-env", "LLMCG_API_KEY_ENV", "api_key_env"}, ValueType::Text},
      {{"--cache-dir", "LLMCG_CACHE_DIR", "cache_dir"}, ValueType::Text},
      {{"--no-cache", "LLMCG_NO_CACHE", "no_cache"}, ValueType::Boolean},
      {{"--temperature", "LLMCG_TEMPERATURE", "temperature"}, ValueType::Real},
      {{"--max-retries", "LLMCG_MAX_RETRIES", "max_retries"}, ValueType::Integer},
      {{"--timeout", "LLMCG_TIMEOUT", "timeout_seconds"}, ValueType::Real},
      {{"--rpm", "LLMCG_RPM", "requests_per_minute"}, ValueType::Real},
      {{"--parallelism", "LLMCG_PARALLELISM", "parallelism"}, ValueType::Integer},
      {{"--entity-cap", "LLMCG_ENTITY_CAP", "entity_cap"}, ValueType::Integer},
      {{"--enforce-acyclic", "LLMCG_ENFORCE_ACYCLIC", "enforce_acyclic"}, ValueType::Boolean},
      {{"--out", "LLMCG_OUT", "output_dir"}, ValueType::Text},
      {{"--domain-hint", "LLMCG_DOMAIN_HINT", "domain_hint"}, ValueType::Text},
      {{"--replay", "LLMCG_REPLAY", "replay"}, ValueType::Text},
      {{"--record", "LLMCG_RECORD", "record"}, ValueType::Text},
      {{"--non-strict", "LLMCG_NON_STRICT", "non_strict"}, ValueType::Boolean},
  };
  return table;
}

const Setting* setting_by_key(const std::string& key) {
  for (const Setting& setting : settings()) {
    if (key == setting.name.config_key) return &setting;
  }
  return nullptr;
}

[[noreturn]] void bad_value(const std::string& origin, const std::string& detail) {
  throw Error(ErrorCode::InvalidConfig, origin + ": " + detail);
}

json from_env_text(const Setting& setting, const std::string& text) {
  const std::string origin = setting.name.env;
  try {
    std::size_t used = 0;
    switch (setting.type) {
      case ValueType::Text:
        return text;
      case ValueType::Real: {
        const double value = std::stod(text, &used);
        if (used != text.size()) break;
        return value;
      }
      case ValueType::Integer: {
        const long long value = std::stoll(text, &used);
        if (used != text.size()) break;
        return value;
      }
      case ValueType::Boolean:
        if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
        if (text == "0" || text == "false" || text == "no" || text == "off" || text.empty()) {
          return false;
        }
        break;
    }
  } catch (const std::logic_error&) {
  }
  bad_value(origin, "cannot interpret '" + text + "'");
}

// Layers settings on top of each other; later layers win.
void apply(std::map<std::string, json>& state, const std::string& key, const json& value,
           const std::string& origin) {
  const Setting* setting = setting_by_key(key);
  if (!setting) bad_value(origin, "unknown setting '" + key + "'");
  const bool ok = (setting->type == ValueType::Text && value.is_string()) ||
                  (setting->type == ValueType::Real && value.is_number()) ||
                  (setting->type == ValueType::Integer && value.is_number_integer()) ||
                  (setting->type == ValueType::Boolean && value.is_boolean());
  if (!ok) bad_value(origin, "wrong type for '" + key + "'");
  state[key] = value;
}

void finalize(CliConfig& config, const std::map<std::string, json>& state) {
  auto text = [&](const char* key) { return state.at(key).get<std::string>(); };
  auto has = [&](const char* key) { return state.contains(key); };
  if (has("model")) config.provider.model_name = text("model");
  if (has("endpoint")) config.provider.endpoint_url = text("endpoint");
  if (has("api_key_env")) config.provider.api_key_env = text("api_key_env");
  if (has("cache_dir")) config.provider.cache_dir = text("cache_dir");
  if (has("no_cache")) config.use_cache = !state.at("no_cache").get<bool>();
  if (has("temperature")) config.provider.temperature = state.at("temperature").get<double>();
  if (has("max_retries")) config.provider.max_retries = state.at("max_retries").get<int>();
  if (has("timeout_seconds")) {
    config.provider.request_timeout_seconds = state.at("timeout_seconds").get<double>();
  }
  if (has("requests_per_minute")) {
    config.provider.requests_per_minute = state.at("requests_per_minute").get<double>();
  }
  if (has("parallelism")) config.provider.parallelism = state.at("parallelism").get<int>();
  if (has("entity_cap")) {
    const long long cap = state.at("entity_cap").get<long long>();
    if (cap < 0) throw Error(ErrorCode::InvalidConfig, "entity cap must be >= 2");
    config.entity_cap = static_cast<std::size_t>(cap);
  }
  if (has("enforce_acyclic")) config.enforce_acyclic = state.at("enforce_acyclic").get<bool>();
  if (has("output_dir")) config.output_dir = text("output_dir");
  if (has("domain_hint")) config.domain_hint = text("domain_hint");
  if (has("non_strict")) config.strict_replay = !state.at("non_strict").get<bool>();
  const bool replay = has("replay") && !text("replay").empty();
  const bool record = has("record") && !text("record").empty();
  if (replay && record) {
    throw Error(ErrorCode::InvalidConfig, "--replay and --record are mutually exclusive");
  }
  if (replay) {
    config.mode = Mode::Replay;
    config.fixture_path = text("replay");
  } else if (record) {
    config.mode = Mode::Record;
    config.fixture_path = text("record");
  }
}

std::string domain_hint_text(const std::string& hint) {
  if (hint == "medical") return std::string(kMedicalDomainHint);
  return hint;
}

// Everything a command needs to talk to the model.
struct Session {
  std::unique_ptr<CacheLock> lock;
  std::shared_ptr<ExchangeRecorder> recorder;
  std::unique_ptr<Gateway> gateway;
  const CliConfig* config = nullptr;

  void finish() const {
    if (!recorder) return;
    ReplayFixture fixture;
    if (fs::exists(config->fixture_path)) fixture = load_fixture(config->fixture_path);
    merge_fixture(fixture, record_fixture(recorder->exchanges()));
    if (config->fixture_path.has_parent_path()) {
      fs::create_directories(config->fixture_path.parent_path());
    }
    save_fixture(fixture, config->fixture_path);
  }
};

Session open_session(const CliConfig& config) {
  Session session;
  session.config = &config;
  if (config.mode == Mode::Replay) {
    ReplayFixture fixture = load_fixture(config.fixture_path);
    if (!config.strict_replay) fixture.strict = false;
    session.gateway = std::make_unique<Gateway>(
        config.provider, std::make_shared<ReplayProvider>(std::move(fixture)));
    return session;
  }
  if (!std::getenv(config.provider.api_key_env.c_str())) {
    throw Error(ErrorCode::InvalidConfig,
                "credential variable " + config.provider.api_key_env + " is not set");
  }
  std::shared_ptr<TokenBucket> limiter;
  if (config.provider.requests_per_minute > 0.0) {
    limiter = std::make_shared<TokenBucket>(config.provider.requests_per_minute,
                                            config.provider.rate_limit_burst);
  }
  auto provider = std::make_shared<HttpChatProvider>(make_httplib_transport(), limiter);
  std::shared_ptr<ResponseCache> cache;
  if (config.use_cache && !config.provider.cache_dir.empty()) {
    session.lock = std::make_unique<CacheLock>(config.provider.cache_dir);
    cache = std::make_shared<ResponseCache>(config.provider.cache_dir);
  }
  session.gateway = std::make_unique<Gateway>(config.provider, provider, cache);
  if (config.mode == Mode::Record) {
    session.recorder = std::make_shared<ExchangeRecorder>();
    session.gateway->set_observer(
        [recorder = session.recorder](const ChatExchange& exchange) { (*recorder)(exchange); });
  }
  return session;
}

std::string json_text(const json& document) { return document.dump(2) + "\n"; }

// "doc.run.json" -> "doc"
std::string document_stem(const fs::path& path) {
  std::string stem = path.stem().string();
  for (const char* suffix : {".run", ".graph"}) {
    const std::string s = suffix;
    if (stem.size() > s.size() && stem.ends_with(s)) return stem.substr(0, stem.size() - s.size());
  }
  return stem;
}

json error_to_json(const Error& error) {
  return {{"error", to_string(error.code())}, {"message", error.what()}};
}

CausalGraph load_extracted_graph(const fs::path& path) {
  json document;
  try {
    document = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (document.is_object() && document.value("format", "") == "llmcg.run") {
    if (!document.contains("graph")) {
      throw Error(ErrorCode::ParseError, path.string() + ": run report without a graph");
    }
    return graph_from_json(document.at("graph"));
  }
  return graph_from_json(document);
}

CausalGraph load_truth_graph(const fs::path& path) {
  json document;
  try {
    document = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (document.is_object() && !document.contains("kind")) document["kind"] = "ground_truth";
  return graph_from_json(document);
}

void print_rate(std::ostream& out, const char* label, const Rate& rate) {
  out << label << rate.to_string() << " (" << rate.numerator << '/' << rate.denominator << ")\n";
}

}  // namespace

CliConfig::CliConfig() { provider.cache_dir = ".llmcg-cache"; }

void CliConfig::validate() const {
  provider.validate();
  if (entity_cap < 2) throw Error(ErrorCode::InvalidConfig, "entity cap must be >= 2");
  if (mode == Mode::Replay && !fs::is_regular_file(fixture_path)) {
    throw Error(ErrorCode::InvalidConfig, "replay fixture not found: " + fixture_path.string());
  }
  if (mode == Mode::Record && fs::is_directory(fixture_path)) {
    throw Error(ErrorCode::InvalidConfig,
                "record target is a directory: " + fixture_path.string());
  }
}

EnvLookup process_environment() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* value = std::getenv(name.c_str())) return std::string(value);
    return std::nullopt;
  };
}

const std::vector<SettingName>& setting_names() {
  static const std::vector<SettingName> names = [] {
    std::vector<SettingName> out;
    for (const Setting& setting : settings()) out.push_back(setting.name);
    return out;
  }();
  return names;
}

CliConfig resolve_config(const CliFlags& flags, const EnvLookup& env) {
  CliConfig config;
  std::map<std::string, json> state;

  std::optional<fs::path> config_file = flags.config_file;
  if (!config_file) {
    if (auto value = env("LLMCG_CONFIG"); value && !value->empty()) config_file = *value;
  }
  if (config_file) {
    json document;
    try {
      document = json::parse(read_file(*config_file));
    } catch (const json::exception& e) {
      bad_value(config_file->string(), e.what());
    } catch (const Error& e) {
      bad_value(config_file->string(), e.what());
    }
    if (!document.is_object()) bad_value(config_file->string(), "expected a JSON object");
    for (const auto& [key, value] : document.items()) {
      apply(state, key, value, config_file->string());
    }
  }

  for (const Setting& setting : settings()) {
    if (auto value = env(setting.name.env)) {
      apply(state, setting.name.config_key, from_env_text(setting, *value),
            setting.name.env);
    }
  }

  auto flag = [&](const char* key, const auto& value) {
    if (value) apply(state, key, json(*value), "command line");
  };
  auto path_flag = [&](const char* key, const std::optional<fs::path>& value) {
    if (value) apply(state, key, json(value->string()), "command line");
  };
  flag("model", flags.model);
  flag("endpoint", flags.endpoint);
  flag("api_key_env", flags.api_key_env);
  path_flag("cache_dir", flags.cache_dir);
  flag("no_cache", flags.no_cache);
  flag("temperature", flags.temperature);
  flag("max_retries", flags.max_retries);
  flag("timeout_seconds", flags.timeout);
  flag("requests_per_minute", flags.rpm);
  flag("parallelism", flags.parallelism);
  flag("entity_cap", flags.entity_cap);
  flag("enforce_acyclic", flags.enforce_acyclic);
  path_flag("output_dir", flags.output_dir);
  flag("domain_hint", flags.domain_hint);
  flag("non_strict", flags.non_strict);
  if (flags.replay) {
    path_flag("replay", flags.replay);
    state.erase("record");
  }
  if (flags.record) {
    path_flag("record", flags.record);
    if (!flags.replay) state.erase("replay");
  }

  finalize(config, state);
  return config;
}

int cmd_extract(const CliConfig& config, const std::vector<fs::path>& inputs, std::ostream& out,
                std::ostream& err) {
  try {
    config.validate();
    if (inputs.empty()) throw Error(ErrorCode::InvalidConfig, "no input documents");
    for (const fs::path& input : inputs) {
      if (!fs::is_regular_file(input)) {
        throw Error(ErrorCode::InvalidConfig, "cannot read input " + input.string());
      }
    }
    fs::create_directories(config.output_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  Session session;
  try {
    session = open_session(config);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  PipelineConfig pipeline;
  pipeline.entity_cap = config.entity_cap;
  pipeline.enforce_acyclic = config.enforce_acyclic;
  pipeline.parallelism = config.provider.parallelism;
  const std::string hint = domain_hint_text(config.domain_hint);

  std::size_t failures = 0;
  for (const fs::path& input : inputs) {
    const std::string stem = input.stem().string();
    const fs::path base = config.output_dir / stem;
    try {
      const PipelineRun run = run_pipeline(read_file(input), hint, pipeline, *session.gateway);
      write_file_atomic(base.string() + ".graph.dot",
                        serialize_graph(run.graph, GraphFormat::Dot));
      write_file_atomic(base.string() + ".graph.json",
                        serialize_graph(run.graph, GraphFormat::StructuredGraphFile));
      write_file_atomic(base.string() + ".analysis.json", json_text(analysis_to_json(run)));
      write_file_atomic(base.string() + ".run.json", json_text(run_to_json(run)));
      fs::remove(base.string() + ".failed.json");
      for (const std::string& warning : run.warnings) err << stem << ": warning: " << warning << '\n';
      out << stem << ": " << run.entities.size() << " entities, " << run.graph.arcs().size()
          << " arcs, " << run.cycles.cycles.size() << " cycles, "
          << run.transitive_candidates.size() << " suspected transitive, "
          << run.stats.orientation_calls + 1 << " model calls\n";
    } catch (const PipelineError& e) {
      ++failures;
      err << stem << ": " << e.what() << '\n';
      json report = error_to_json(e);
      report["error"] = to_string(e.cause());
      report["partial_run"] = run_to_json(e.partial());
      write_file_atomic(base.string() + ".failed.json", json_text(report));
    } catch (const Error& e) {
      ++failures;
      err << stem << ": failed: " << e.what() << '\n';
      write_file_atomic(base.string() + ".failed.json", json_text(error_to_json(e)));
    }
  }

  try {
    session.finish();
  } catch (const std::exception& e) {
    err << "error: cannot write fixture: " << e.what() << '\n';
    return kExitPartial;
  }
  return failures == 0 ? kExitOk : kExitPartial;
}

int cmd_eval_pairs(const CliConfig& config, const fs::path& semeval_path, std::ostream& out,
                   std::ostream& err) {
  try {
    config.validate();
    const std::vector<SemEvalRecord> records = parse_semeval(read_file(semeval_path));
    Session session = open_session(config);
    const PairwiseReport report =
        run_pairwise_eval(records, *session.gateway, config.provider.parallelism);
    session.finish();
    fs::create_directories(config.output_dir);
    const fs::path target = config.output_dir / (semeval_path.stem().string() + ".pairwise.json");
    write_file_atomic(target, json_text(report_to_json(report)));
    out << format_confusion_table(report);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_eval_graph(const CliConfig& config, const fs::path& run_path, const fs::path& truth_path,
                   std::ostream& out, std::ostream& err) {
  try {
    CausalGraph extracted = load_extracted_graph(run_path);
    const CausalGraph truth = load_truth_graph(truth_path);
    flag_transitive_candidates(extracted);
    const GraphRunEvaluation evaluation = evaluate_graph_run(extracted, truth);
    fs::create_directories(config.output_dir);
    const fs::path target = config.output_dir / (document_stem(run_path) + ".comparison.json");
    write_file_atomic(target, json_text(graph_evaluation_to_json(evaluation)));
    const GraphComparison& c = evaluation.comparison;
    out << "true positives: " << c.true_positive_arcs.size()
        << "  false positives: " << c.false_positive_arcs.size()
        << "  false negatives: " << c.false_negative_arcs.size() << '\n';
    print_rate(out, "precision: ", c.precision);
    print_rate(out, "recall: ", c.recall);
    print_rate(out, "f1: ", c.f1);
    print_rate(out, "transitive share of false positives: ", evaluation.transitive_fp_share);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_orient(const CliConfig& config, const fs::path& pdag_path, const fs::path& text_path,
               std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    const PartiallyDirectedGraph pdag = parse_pdag(read_file(pdag_path));
    const std::string text = read_file(text_path);
    Session session = open_session(config);
    const CpdagOrientation result =
        orient_cpdag(pdag, text, *session.gateway, config.provider.parallelism);
    session.finish();
    fs::create_directories(config.output_dir);
    const fs::path base = config.output_dir / (document_stem(pdag_path) + ".oriented");
    write_file_atomic(base.string() + ".json",
                      serialize_graph(result.graph, GraphFormat::StructuredGraphFile));
    write_file_atomic(base.string() + ".dot", serialize_graph(result.graph, GraphFormat::Dot));
    for (const std::string& warning : result.warnings) err << "warning: " << warning << '\n';
    out << result.query_count << " edges queried, " << result.graph.arcs().size()
        << " arcs in the oriented graph\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_cache(const CliConfig& config, CacheAction action, std::ostream& out, std::ostream& err) {
  try {
    if (config.provider.cache_dir.empty()) {
      throw Error(ErrorCode::InvalidConfig, "no cache directory configured");
    }
    const ResponseCache cache(config.provider.cache_dir);
    if (action == CacheAction::Clear) {
      const std::size_t removed = cache.clear();
      out << "removed " << removed << " entries\n";
    }
    const CacheStats stats = cache.stats();
    out << "entries: " << stats.entries << "\nbytes: " << stats.bytes << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env) {
  CLI::App app{"Causal graph extraction with chat-completion models", "llmcg"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "llmcg 0.1.0");

  CliFlags flags;
  auto text_option = [&](const char* name, auto& target, const char* help) {
    using Target = typename std::decay_t<decltype(target)>::value_type;
    return app.add_option_function<std::string>(
        name, [&target](const std::string& value) { target = Target(value); }, help);
  };
  auto number_option = [&](const char* name, auto& target, const char* help) {
    using Target = typename std::decay_t<decltype(target)>::value_type;
    return app.add_option_function<Target>(
        name, [&target](const Target& value) { target = value; }, help);
  };
  auto switch_flag = [&](const char* name, std::optional<bool>& target, const char* help) {
    return app.add_flag_callback(name, [&target] { target = true; }, help);
  };

  text_option("--config", flags.config_file, "JSON configuration file");
  text_option("--replay", flags.replay, "answer from a replay fixture instead of the API");
  text_option("--record", flags.record, "call the API and record exchanges into a fixture");
  text_option("--model", flags.model, "chat model name");
  text_option("--endpoint", flags.endpoint, "chat-completions endpoint URL");
  text_option("--api-key-env", flags.api_key_env, "environment variable holding the API key");
  text_option("--cache-dir", flags.cache_dir, "response cache directory");
  switch_flag("--no-cache", flags.no_cache, "disable the response cache");
  number_option("--temperature", flags.temperature, "sampling temperature");
  number_option("--max-retries", flags.max_retries, "retries per request");
  number_option("--timeout", flags.timeout, "request timeout in seconds");
  number_option("--rpm", flags.rpm, "requests per minute (0 disables the limiter)");
  number_option("--parallelism", flags.parallelism, "concurrent queries");
  number_option("--entity-cap", flags.entity_cap, "maximum entities per document");
  switch_flag("--enforce-acyclic", flags.enforce_acyclic, "remove arcs until the graph is acyclic");
  text_option("--out", flags.output_dir, "output directory");
  text_option("--domain-hint", flags.domain_hint,
              "entity types to emphasise ('medical' selects the built-in list)");
  switch_flag("--non-strict", flags.non_strict, "treat replay misses as unparsable replies");

  std::vector<std::string> inputs;
  CLI::App* extract = app.add_subcommand("extract", "extract causal graphs from text documents");
  extract->add_option("documents", inputs, "plain-text documents")->required();

  std::string semeval_path;
  CLI::App* eval_pairs =
      app.add_subcommand("eval-pairs", "orientation benchmark on a SemEval-format file");
  eval_pairs->add_option("semeval", semeval_path, "SemEval-format relation file")->required();

  std::string run_path, truth_path;
  CLI::App* eval_graph = app.add_subcommand("eval-graph", "compare an extracted graph to a reference");
  eval_graph->add_option("run", run_path, "run report or graph file")->required();
  eval_graph->add_option("truth", truth_path, "reference graph file")->required();

  std::string pdag_path, text_path;
  CLI::App* orient =
      app.add_subcommand("orient", "orient the undirected edges of a partially directed graph");
  orient->add_option("pdag", pdag_path, "partially directed graph file")->required();
  orient->add_option("text", text_path, "source text")->required();

  std::string action;
  CLI::App* cache = app.add_subcommand("cache", "inspect or clear the response cache");
  cache->add_option("action", action, "stats or clear")
      ->required()
      ->check(CLI::IsMember({"stats", "clear"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CliConfig config;
  try {
    config = resolve_config(flags, env);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (extract->parsed()) {
    return cmd_extract(config, {inputs.begin(), inputs.end()}, out, err);
  }
  if (eval_pairs->parsed()) return cmd_eval_pairs(config, semeval_path, out, err);
  if (eval_graph->parsed()) return cmd_eval_graph(config, run_path, truth_path, out, err);
  if (orient->parsed()) return cmd_orient(config, pdag_path, text_path, out, err);
  return cmd_cache(config, action == "clear" ? CacheAction::Clear : CacheAction::Stats, out, err);
}

}  // namespace llmcg::cli

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace llmcg {

enum class ErrorCode {
  // graph
  UnknownEntity,
  SelfLoop,
  OppositeArcConflict,
  CycleBudgetExceeded,
  InvalidGraph,
  // prompts
  EntityNotInText,
  EmptyText,
  NoEntitiesFound,
  // gateway
  ProviderUnavailable,
  AuthError,
  RequestRejected,
  MalformedProviderResponse,
  FixtureMiss,
  DuplicateFingerprint,
  CacheCorrupt,
  CacheLocked,
  InvalidConfig,
  // pipeline / evaluation
  TooFewEntities,
  PipelineFailed,
  ParseError,
  EmptyEvaluationSet,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace llmcg

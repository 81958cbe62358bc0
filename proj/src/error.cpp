#include "llmcg/error.hpp"

namespace llmcg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::OppositeArcConflict: return "OppositeArcConflict";
    case ErrorCode::CycleBudgetExceeded: return "CycleBudgetExceeded";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::EntityNotInText: return "EntityNotInText";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::NoEntitiesFound: return "NoEntitiesFound";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::RequestRejected: return "RequestRejected";
    case ErrorCode::MalformedProviderResponse: return "MalformedProviderResponse";
    case ErrorCode::FixtureMiss: return "FixtureMiss";
    case ErrorCode::DuplicateFingerprint: return "DuplicateFingerprint";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::CacheLocked: return "CacheLocked";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::TooFewEntities: return "TooFewEntities";
    case ErrorCode::PipelineFailed: return "PipelineFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace llmcg

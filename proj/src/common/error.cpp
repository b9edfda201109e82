#include "hg/common/error.hpp"

namespace hg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kEmptyName: return "EmptyName";
    case ErrorCode::kUnknownMember: return "UnknownMember";
    case ErrorCode::kDuplicateMember: return "DuplicateMember";
    case ErrorCode::kEmptyTeam: return "EmptyTeam";
    case ErrorCode::kOutOfBounds: return "OutOfBounds";
    case ErrorCode::kInvalidAnchor: return "InvalidAnchor";
    case ErrorCode::kUnknownTeam: return "UnknownTeam";
    case ErrorCode::kDeletedCharacterInTeam: return "DeletedCharacterInTeam";
    case ErrorCode::kInvalidSelection: return "InvalidSelection";
    case ErrorCode::kNoWorkAvailable: return "NoWorkAvailable";
    case ErrorCode::kAlreadyActive: return "AlreadyActive";
    case ErrorCode::kAlreadyWorkedTask: return "AlreadyWorkedTask";
    case ErrorCode::kNotClaimant: return "NotClaimant";
    case ErrorCode::kBadState: return "BadState";
    case ErrorCode::kNoIdeasYet: return "NoIdeasYet";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kNoKnownTokens: return "NoKnownTokens";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNoVectorizableSentence: return "NoVectorizableSentence";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kAllTied: return "AllTied";
    case ErrorCode::kDegenerateDifferences: return "DegenerateDifferences";
    case ErrorCode::kTooFew: return "TooFew";
    case ErrorCode::kMissingRatings: return "MissingRatings";
    case ErrorCode::kUnpairedStory: return "UnpairedStory";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kRecoveryError: return "RecoveryError";
    case ErrorCode::kPortBindError: return "PortBindError";
    case ErrorCode::kStorageFull: return "StorageFull";
    case ErrorCode::kDenied: return "Denied";
    case ErrorCode::kServerUnreachable: return "ServerUnreachable";
    case ErrorCode::kCorpusTooSmall: return "CorpusTooSmall";
  }
  return "Unknown";
}

}  // namespace hg

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hg {

enum class ErrorCode {
  kInvalidArgument,
  kNotFound,
  // workspace
  kEmptyName,
  kUnknownMember,
  kDuplicateMember,
  kEmptyTeam,
  kOutOfBounds,
  kInvalidAnchor,
  // orchestrator
  kUnknownTeam,
  kDeletedCharacterInTeam,
  kInvalidSelection,
  kNoWorkAvailable,
  kAlreadyActive,
  kAlreadyWorkedTask,
  kNotClaimant,
  kBadState,
  kNoIdeasYet,
  // distance
  kParseError,
  kDimensionMismatch,
  kEmptyFile,
  kNoKnownTokens,
  kZeroVector,
  kNoVectorizableSentence,
  // stats
  kLengthMismatch,
  kZeroVariance,
  kAllTied,
  kDegenerateDifferences,
  kTooFew,
  kMissingRatings,
  kUnpairedStory,
  // service
  kConfigError,
  kRecoveryError,
  kPortBindError,
  kStorageFull,
  kDenied,
  // sim
  kServerUnreachable,
  kCorpusTooSmall,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace hg

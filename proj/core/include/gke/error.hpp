#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gke {

enum class ErrorCode {
  kParameterValidation,
  kNonInvertible,
  kMembership,
  kDecode,
  kIncompleteRoster,
  kInconsistentPartial,
  kNoSlot,
  kNotAMember,
  kInvalidEviction,
  kEmptyRoster,
  kRosterConflict,
  kDegenerateJoin,
  kVariantMismatch,
  kDegenerate,
  kAttackInapplicable,
  kRouting,
  kParse,
  kScenario,
  kInvariant,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so that
/// callers (tests, the CLI) can branch on the cause instead of the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gke

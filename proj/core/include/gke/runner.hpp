#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "gke/error.hpp"
#include "gke/group.hpp"
#include "gke/scenario.hpp"
#include "gke/transcript.hpp"

namespace gke {

/// Raised when a scenario aborts; carries the index of the failing event and
/// the code of the underlying protocol, routing or invariant error.
class ScenarioError : public Error {
 public:
  ScenarioError(ErrorCode code, std::size_t event_index, const std::string& what)
      : Error(code, what), event_index_(event_index) {}

  std::size_t event_index() const noexcept { return event_index_; }

 private:
  std::size_t event_index_;
};

/// Drives every member through the script over an in-memory bus. After each
/// broadcast all members recover the key, and the run aborts (kInvariant) if
/// any recovery, slot identity or chain value disagrees with the exponent
/// oracle. Pure function of (script, group, seed).
Transcript run_scenario(const Script& script, const Group& group, std::uint64_t seed);

}  // namespace gke

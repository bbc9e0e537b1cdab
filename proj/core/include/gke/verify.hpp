#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gke/group.hpp"
#include "gke/oracle.hpp"
#include "gke/protocol.hpp"
#include "gke/transcript.hpp"

namespace gke {

struct CheckResult {
  std::string check;  // membership, epoch-chain, roster, chain-R, chain-S, ...
  std::uint64_t epoch = 0;
  std::optional<MemberId> member;
  bool passed = true;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::size_t failures() const;
};

/// Replays the oracle section of a transcript in the exponent field and
/// checks every broadcast against it: the key recomputed from raw scalars,
/// every member's recovery (slot identity), R/S chaining, epoch chaining,
/// roster bookkeeping, and subgroup membership of every wire element.
/// Throws kParse when a record is structurally unusable.
VerifyReport verify_transcript(const Transcript& transcript, const Group& group);

struct EpochSummary {
  std::uint64_t epoch = 0;
  Variant variant = Variant::kP1;
  MemberId controller;
  std::size_t roster_size = 0;
  Element key;
};

/// Per-broadcast keys taken from the oracle section.
std::vector<EpochSummary> summarize(const Transcript& transcript, const Group& group);

/// Short, log-safe identifier of a key: the first 8 hex digits of the
/// magnitude part of its canonical encoding.
std::string fingerprint(const Group& group, const Element& key);

/// One application of a recovery formula by a member who must not learn the
/// key: an evicted member against a later broadcast, or a joiner against an
/// earlier one.
struct SecrecyProbe {
  bool eviction = true;
  MemberId prober;
  PrivatePair prober_pair;
  std::uint64_t seq = 0;  // probed broadcast
  std::uint64_t epoch = 0;
  MemberId slot_owner;
  PrivatePair slot_pair;  // owner's effective pair at that epoch
};

struct SecrecyReport {
  std::size_t eviction_probes = 0;
  std::size_t join_probes = 0;
  std::vector<SecrecyProbe> hits;  // probes that produced the protected key
};

/// Every evicted member tries its last effective pair on every slot of every
/// later broadcast; every joiner tries its pair on every slot of every
/// broadcast before its join. Needs the oracle section.
SecrecyReport probe_membership_secrecy(const Transcript& transcript, const Group& group);

}  // namespace gke

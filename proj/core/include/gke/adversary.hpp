#pragma once

// Passive-adversary tools. The single-key IKA variant shows why every member
// needs a second key pair: its broadcast values multiply to K^{n-2}, so an
// eavesdropper who knows q recovers K. The same product over a real keying
// message yields an unrelated element.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gke/group.hpp"
#include "gke/protocol.hpp"
#include "gke/transcript.hpp"
#include "gke/wire.hpp"

namespace gke {

struct SingleKeyBroadcast {
  MemberId controller;
  std::map<MemberId, Element> messages;  // D_i for every i != controller
  std::size_t n = 0;
};

struct SingleKeyOutput {
  SingleKeyBroadcast broadcast;
  Element key;
};

/// K = g^{k_c * sum_{r != c} k_r},  D_i = g^{k_c * sum_{r != i,c} k_r}.
/// Throws kDegenerate for fewer than three members.
SingleKeyOutput single_key_ika(const Group& group, const std::map<MemberId, Scalar>& scalars,
                               MemberId controller);

/// (prod D_i)^{(n-2)^{-1} mod q}. Throws kAttackInapplicable when q | n-2.
Element product_attack(const Group& group, const SingleKeyBroadcast& broadcast);

/// The same computation over the non-controller slots of an IKA broadcast.
Element attack_real_protocol(const Group& group, const KeyingMessage& msg, MemberId controller);

/// Everything a passive eavesdropper sees in a run: publications, unicasts,
/// petitions and broadcasts, with the oracle sections removed.
struct AdversaryView {
  std::vector<TranscriptRecord> records;

  std::string to_jsonl() const;
  static AdversaryView from_jsonl(std::string_view text);
};

AdversaryView capture_view(const Transcript& transcript);

struct AttackReport {
  std::string mode;  // "single-key" or "transcript"
  std::string variant;
  std::size_t n = 0;
  std::uint64_t seq = 0;  // attacked broadcast, transcript mode only
  bool applicable = false;
  bool recovered = false;         // candidate equals the true key
  bool matches_true_key = false;  // same comparison, reported per the CLI contract
};

Json to_json(const AttackReport& report);

/// Runs attack_real_protocol against every IKA broadcast of a transcript and
/// compares with the oracle's key. Inapplicable instances are reported, not
/// thrown.
std::vector<AttackReport> attack_transcript(const Group& group, const Transcript& transcript);

}  // namespace gke

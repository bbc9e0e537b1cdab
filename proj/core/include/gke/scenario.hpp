#pragma once

// Scenario scripts: a JSON array of events, e.g.
//
//   [{"kind": "ika", "variant": "P1", "controller": 1,
//     "members": [{"id": 1, "r": "2", "x": "3"}, {"id": 2}, {"id": 3}],
//     "fresh": {"r": "9", "x": "10"}},
//    {"kind": "rekey", "controller": 2},
//    {"kind": "evict", "controller": 2, "leavers": [3]},
//    {"kind": "join", "collector": 1, "joiners": [{"id": 4}]},
//    {"kind": "attack_demo"}]
//
// Scalars may be pinned as decimal (or 0x-hex) strings; anything left out is
// drawn from the seeded sampler. "members" may also be a count n, meaning
// ids 1..n.

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "gke/protocol.hpp"
#include "gke/wire.hpp"

namespace gke {

struct MemberSpec {
  MemberId id;
  std::optional<mpz_class> r;
  std::optional<mpz_class> x;
};

struct PinnedPair {
  mpz_class r;
  mpz_class x;
};

struct IkaEvent {
  Variant variant = Variant::kP1;
  MemberId controller;
  std::vector<MemberSpec> members;
  std::optional<PinnedPair> fresh;
};

struct RekeyEvent {
  MemberId controller;
  std::optional<PinnedPair> fresh;
};

struct EvictEvent {
  MemberId controller;
  std::set<MemberId> leavers;
  std::optional<PinnedPair> fresh;
};

struct JoinEvent {
  MemberId collector;
  std::vector<MemberSpec> joiners;
  std::optional<PinnedPair> fresh;
};

struct AttackDemoEvent {};

using ScenarioEvent = std::variant<IkaEvent, RekeyEvent, EvictEvent, JoinEvent, AttackDemoEvent>;
using Script = std::vector<ScenarioEvent>;

std::string_view event_kind(const ScenarioEvent& event);

/// Structural checks that need no group: the first (and only the first)
/// event is an IKA, ids are unique, the IKA controller is one of the members.
/// Roster membership at execution time is checked by the runner.
void validate_script(const Script& script);

/// Throws kParse for malformed JSON, kScenario for invalid scripts.
Script parse_script(const Json& j);
Script parse_script_text(std::string_view text);
Script load_script(const std::string& path);

Json to_json(const Script& script);

}  // namespace gke

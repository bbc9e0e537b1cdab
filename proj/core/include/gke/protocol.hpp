#pragma once

// Member and controller operations for initial key agreement (two variants),
// single-broadcast rekeying, eviction and mass join.
//
// Every keying message satisfies the slot identity
//
//     Y_i * S^x_i * R^r_i == K        (two-key chains)
//     Y_i * R^x_i * R^r_i == K        (chains started by the distributed IKA)
//
// for each roster member i holding its current effective pair (r_i, x_i).
// All recovery formulas are instances of it.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gke/group.hpp"

namespace gke {

struct MemberId {
  std::uint32_t value = 0;

  friend auto operator<=>(const MemberId&, const MemberId&) = default;
};

std::string to_string(MemberId id);

struct KeyPair {
  Scalar r;
  Scalar x;
  Element pub_r;
  Element pub_x;
};

KeyPair make_key_pair(const Group& group, const Scalar& r, const Scalar& x);
KeyPair sample_key_pair(const Group& group, Rng& rng);

enum class Role { kMember, kController };

struct MemberState {
  MemberId id;
  KeyPair pair;
  std::uint64_t epoch = 0;
  std::optional<Element> key;
  Role role = Role::kMember;
};

MemberState make_member(MemberId id, KeyPair pair);

/// Which protocol produced a keying message: centralised IKA, distributed IKA,
/// rekey (plain or with eviction) and join.
enum class Variant { kP1, kP2, kP3, kP4 };

std::string_view to_string(Variant v);
/// Throws kParse for anything other than P1..P4.
Variant parse_variant(std::string_view text);

struct KeyingMessage {
  std::uint64_t epoch = 0;
  Variant variant = Variant::kP1;
  std::vector<MemberId> roster;  // ascending
  std::map<MemberId, Element> slots;
  Element R;
  std::optional<Element> S;  // absent on chains started by the distributed IKA

  bool has_slot(MemberId id) const { return slots.contains(id); }

  friend bool operator==(const KeyingMessage&, const KeyingMessage&) = default;
};

struct JoinPetition {
  MemberId joiner;
  Element blinded_r;
  Element blinded_x;

  friend bool operator==(const JoinPetition&, const JoinPetition&) = default;
};

/// Round-one publication. Distributed-IKA runs publish only pub_r.
struct PublicKeys {
  Element pub_r;
  std::optional<Element> pub_x;
};

using PublishedKeys = std::map<MemberId, PublicKeys>;
using MemberElements = std::map<MemberId, Element>;

/// Result of a controller-side build: the broadcast plus the key the
/// controller computed for itself.
struct KeyingOutput {
  KeyingMessage message;
  Element key;
};

PublicKeys publish_keys(const MemberState& member, Variant variant);

// --- centralised IKA -------------------------------------------------------

/// Product of the other non-controller members' pub_r values.
Element partial_product(const Group& group, const MemberState& member,
                        const PublishedKeys& published, MemberId controller);

/// Consumes the controller's current pair and installs `fresh` as its new
/// effective pair. Each received partial is checked against the value the
/// controller recomputes from the published keys.
KeyingOutput ika1_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& partials,
                               const KeyPair& fresh);
KeyingOutput ika1_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& partials,
                               Rng& rng);

/// Y_i * S^x_i * R^r_i with the member's current pair. Updates key and epoch.
Element recover_key(const Group& group, MemberState& member, const KeyingMessage& msg);

// --- distributed IKA -------------------------------------------------------

Element ika2_blinded_partial(const Group& group, const MemberState& member,
                             const PublishedKeys& published, MemberId controller);

KeyingOutput ika2_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& blinded,
                               const KeyPair& fresh);
KeyingOutput ika2_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& blinded,
                               Rng& rng);

/// Y_i * R^x_i * R^r_i, for messages without S.
Element ika2_recover(const Group& group, MemberState& member, const KeyingMessage& msg);

/// Dispatches to recover_key or ika2_recover depending on whether S is present.
Element recover(const Group& group, MemberState& member, const KeyingMessage& msg);

/// Evaluates the recovery formula for an arbitrary pair against an arbitrary
/// slot without touching any state. Used by oracles and attack checks.
Element recovery_value(const Group& group, const KeyingMessage& msg, const Element& slot,
                       const Scalar& r, const Scalar& x);

// --- rekeying and membership change ---------------------------------------

KeyingOutput aka_rekey(const Group& group, MemberState& new_controller, const KeyingMessage& prev,
                       const Element& prev_key, const KeyPair& fresh);
KeyingOutput aka_rekey(const Group& group, MemberState& new_controller, const KeyingMessage& prev,
                       const Element& prev_key, Rng& rng);

/// Rekey with the leavers' slots erased and the roster shrunk.
KeyingOutput rekey_evict(const Group& group, MemberState& new_controller,
                         const KeyingMessage& prev, const Element& prev_key,
                         const std::set<MemberId>& leavers, const KeyPair& fresh);
KeyingOutput rekey_evict(const Group& group, MemberState& new_controller,
                         const KeyingMessage& prev, const Element& prev_key,
                         const std::set<MemberId>& leavers, Rng& rng);

/// (R_t^r, S_t^x). On chains without S the second value is R_t^x.
JoinPetition join_petition(const Group& group, const MemberState& joiner, const Element& R_t,
                           const std::optional<Element>& S_t);

KeyingOutput join_rekey(const Group& group, MemberState& collector, const KeyingMessage& prev,
                        const Element& prev_key, const std::vector<JoinPetition>& petitions,
                        const KeyPair& fresh);
KeyingOutput join_rekey(const Group& group, MemberState& collector, const KeyingMessage& prev,
                        const Element& prev_key, const std::vector<JoinPetition>& petitions,
                        Rng& rng);

}  // namespace gke

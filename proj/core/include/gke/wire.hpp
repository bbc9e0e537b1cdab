#pragma once

// Canonical JSON wire form of protocol messages. Elements travel as lowercase
// hex of their canonical byte encoding, scalars as decimal strings. Objects
// are emitted with a fixed field order and ascending member ids, so equal
// messages always serialise to identical bytes.

#include <string>

#include <nlohmann/json.hpp>

#include "gke/group.hpp"
#include "gke/protocol.hpp"

namespace gke {

using Json = nlohmann::ordered_json;

Json element_to_json(const Group& group, const Element& e);
/// Throws kDecode / kMembership / kParse.
Element element_from_json(const Group& group, const Json& j);

Json scalar_to_json(const Scalar& s);
Scalar scalar_from_json(const Group& group, const Json& j);

MemberId member_id_from_json(const Json& j);

Json to_json(const Group& group, const KeyingMessage& msg);
KeyingMessage keying_message_from_json(const Group& group, const Json& j);

Json to_json(const Group& group, const JoinPetition& petition);
JoinPetition join_petition_from_json(const Group& group, const Json& j);

Json to_json(const Group& group, const PublicKeys& keys);
PublicKeys public_keys_from_json(const Group& group, const Json& j);

/// Compact dump; the canonical byte form of a payload.
std::string canonical(const Json& j);

}  // namespace gke

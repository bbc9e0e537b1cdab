#include "gke/wire.hpp"

#include <limits>

#include "gke/error.hpp"

namespace gke {
namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

}  // namespace

Json element_to_json(const Group& group, const Element& e) { return group.to_hex(e); }

Element element_from_json(const Group& group, const Json& j) {
  if (!j.is_string()) throw Error(ErrorCode::kParse, "element must be a hex string");
  return group.from_hex(j.get<std::string>());
}

Json scalar_to_json(const Scalar& s) { return s.to_decimal(); }

Scalar scalar_from_json(const Group& group, const Json& j) {
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) {
    return group.scalar(mpz_class(j.get<unsigned long>()));
  }
  if (j.is_string()) return group.scalar(parse_integer(j.get<std::string>()));
  throw Error(ErrorCode::kParse, "scalar must be a decimal string or non-negative integer");
}

MemberId member_id_from_json(const Json& j) {
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0 &&
      j.get<std::int64_t>() <= std::numeric_limits<std::uint32_t>::max()) {
    return MemberId{j.get<std::uint32_t>()};
  }
  if (j.is_string()) {
    const mpz_class v = parse_integer(j.get<std::string>());
    if (v.fits_uint_p()) return MemberId{static_cast<std::uint32_t>(v.get_ui())};
  }
  throw Error(ErrorCode::kParse, "member id must be a non-negative integer");
}

Json to_json(const Group& group, const KeyingMessage& msg) {
  Json j;
  j["epoch"] = msg.epoch;
  j["variant"] = to_string(msg.variant);
  Json roster = Json::array();
  for (MemberId id : msg.roster) roster.push_back(id.value);
  j["roster"] = std::move(roster);
  Json slots = Json::object();
  for (const auto& [id, y] : msg.slots) slots[std::to_string(id.value)] = element_to_json(group, y);
  j["slots"] = std::move(slots);
  j["R"] = element_to_json(group, msg.R);
  if (msg.S) j["S"] = element_to_json(group, *msg.S);
  return j;
}

KeyingMessage keying_message_from_json(const Group& group, const Json& j) {
  try {
    KeyingMessage msg{.epoch = field(j, "epoch").get<std::uint64_t>(),
                      .variant = parse_variant(field(j, "variant").get<std::string>()),
                      .roster = {},
                      .slots = {},
                      .R = element_from_json(group, field(j, "R")),
                      .S = std::nullopt};
    for (const auto& id : field(j, "roster")) msg.roster.push_back(member_id_from_json(id));
    for (const auto& [key, value] : field(j, "slots").items()) {
      msg.slots.emplace(member_id_from_json(Json(key)), element_from_json(group, value));
    }
    if (j.contains("S")) msg.S = element_from_json(group, j.at("S"));
    return msg;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed keying message: ") + e.what());
  }
}

Json to_json(const Group& group, const JoinPetition& petition) {
  Json j;
  j["joiner"] = petition.joiner.value;
  j["blinded_r"] = element_to_json(group, petition.blinded_r);
  j["blinded_x"] = element_to_json(group, petition.blinded_x);
  return j;
}

JoinPetition join_petition_from_json(const Group& group, const Json& j) {
  return JoinPetition{.joiner = member_id_from_json(field(j, "joiner")),
                      .blinded_r = element_from_json(group, field(j, "blinded_r")),
                      .blinded_x = element_from_json(group, field(j, "blinded_x"))};
}

Json to_json(const Group& group, const PublicKeys& keys) {
  Json j;
  j["pub_r"] = element_to_json(group, keys.pub_r);
  if (keys.pub_x) j["pub_x"] = element_to_json(group, *keys.pub_x);
  return j;
}

PublicKeys public_keys_from_json(const Group& group, const Json& j) {
  PublicKeys keys{.pub_r = element_from_json(group, field(j, "pub_r")), .pub_x = std::nullopt};
  if (j.contains("pub_x")) keys.pub_x = element_from_json(group, j.at("pub_x"));
  return keys;
}

std::string canonical(const Json& j) { return j.dump(); }

}  // namespace gke

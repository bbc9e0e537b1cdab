#include "gke/scenario.hpp"

#include <fstream>
#include <sstream>

#include "gke/error.hpp"

namespace gke {
namespace {

Error parse_error(std::size_t index, const std::string& why) {
  return Error(ErrorCode::kParse, "scenario event " + std::to_string(index) + ": " + why);
}

const Json& require(const Json& j, const char* name, std::size_t index) {
  if (!j.contains(name)) throw parse_error(index, std::string("missing field '") + name + "'");
  return j.at(name);
}

mpz_class integer_from_json(const Json& j) {
  if (j.is_number_unsigned()) return mpz_class(j.get<unsigned long>());
  if (j.is_string()) return parse_integer(j.get<std::string>());
  throw Error(ErrorCode::kParse, "scalar must be a decimal string or non-negative integer");
}

std::optional<PinnedPair> fresh_from_json(const Json& j) {
  if (!j.contains("fresh")) return std::nullopt;
  const Json& f = j.at("fresh");
  if (!f.contains("r") || !f.contains("x")) {
    throw Error(ErrorCode::kParse, "pinned fresh pair needs both r and x");
  }
  return PinnedPair{integer_from_json(f.at("r")), integer_from_json(f.at("x"))};
}

std::vector<MemberSpec> members_from_json(const Json& j) {
  std::vector<MemberSpec> out;
  if (j.is_number_unsigned()) {
    const auto n = j.get<std::uint32_t>();
    for (std::uint32_t i = 1; i <= n; ++i) out.push_back({MemberId{i}, std::nullopt, std::nullopt});
    return out;
  }
  if (!j.is_array()) throw Error(ErrorCode::kParse, "member list must be an array or a count");
  for (const Json& m : j) {
    MemberSpec spec{member_id_from_json(m.is_object() ? m.at("id") : m), std::nullopt,
                    std::nullopt};
    if (m.is_object() && m.contains("r")) spec.r = integer_from_json(m.at("r"));
    if (m.is_object() && m.contains("x")) spec.x = integer_from_json(m.at("x"));
    out.push_back(std::move(spec));
  }
  return out;
}

ScenarioEvent event_from_json(const Json& j, std::size_t index) {
  if (!j.is_object()) throw parse_error(index, "event must be an object");
  const std::string kind = require(j, "kind", index).get<std::string>();
  if (kind == "ika") {
    IkaEvent e;
    e.variant = j.contains("variant") ? parse_variant(j.at("variant").get<std::string>())
                                      : Variant::kP1;
    e.controller = member_id_from_json(require(j, "controller", index));
    e.members = members_from_json(require(j, "members", index));
    e.fresh = fresh_from_json(j);
    return e;
  }
  if (kind == "rekey") {
    return RekeyEvent{member_id_from_json(require(j, "controller", index)), fresh_from_json(j)};
  }
  if (kind == "evict") {
    EvictEvent e{member_id_from_json(require(j, "controller", index)), {}, fresh_from_json(j)};
    for (const Json& id : require(j, "leavers", index)) e.leavers.insert(member_id_from_json(id));
    return e;
  }
  if (kind == "join") {
    return JoinEvent{member_id_from_json(require(j, "collector", index)),
                     members_from_json(require(j, "joiners", index)), fresh_from_json(j)};
  }
  if (kind == "attack_demo") return AttackDemoEvent{};
  throw parse_error(index, "unknown event kind '" + kind + "'");
}

Json pinned_to_json(const std::optional<mpz_class>& v) { return v->get_str(10); }

Json members_to_json(const std::vector<MemberSpec>& members) {
  Json arr = Json::array();
  for (const MemberSpec& m : members) {
    Json o;
    o["id"] = m.id.value;
    if (m.r) o["r"] = pinned_to_json(m.r);
    if (m.x) o["x"] = pinned_to_json(m.x);
    arr.push_back(std::move(o));
  }
  return arr;
}

void fresh_to_json(Json& o, const std::optional<PinnedPair>& fresh) {
  if (!fresh) return;
  Json f;
  f["r"] = fresh->r.get_str(10);
  f["x"] = fresh->x.get_str(10);
  o["fresh"] = std::move(f);
}

}  // namespace

std::string_view event_kind(const ScenarioEvent& event) {
  struct Visitor {
    std::string_view operator()(const IkaEvent&) const { return "ika"; }
    std::string_view operator()(const RekeyEvent&) const { return "rekey"; }
    std::string_view operator()(const EvictEvent&) const { return "evict"; }
    std::string_view operator()(const JoinEvent&) const { return "join"; }
    std::string_view operator()(const AttackDemoEvent&) const { return "attack_demo"; }
  };
  return std::visit(Visitor{}, event);
}

void validate_script(const Script& script) {
  if (script.empty()) throw Error(ErrorCode::kScenario, "scenario is empty");
  if (!std::holds_alternative<IkaEvent>(script.front())) {
    throw Error(ErrorCode::kScenario, "scenario must start with an ika event, found '" +
                                          std::string(event_kind(script.front())) + "'");
  }
  std::set<MemberId> seen;
  auto claim = [&seen](MemberId id, std::size_t index) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::kScenario, "event " + std::to_string(index) + ": member id " +
                                            to_string(id) + " used twice");
    }
  };
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (i > 0 && std::holds_alternative<IkaEvent>(script[i])) {
      throw Error(ErrorCode::kScenario,
                  "event " + std::to_string(i) + ": ika is only allowed as the first event");
    }
    if (const auto* ika = std::get_if<IkaEvent>(&script[i])) {
      if (ika->variant != Variant::kP1 && ika->variant != Variant::kP2) {
        throw Error(ErrorCode::kScenario, "ika variant must be P1 or P2");
      }
      if (ika->members.size() < 2) {
        throw Error(ErrorCode::kScenario, "ika needs at least two members");
      }
      bool controller_listed = false;
      for (const MemberSpec& m : ika->members) {
        claim(m.id, i);
        controller_listed = controller_listed || m.id == ika->controller;
      }
      if (!controller_listed) {
        throw Error(ErrorCode::kScenario, "ika controller " + to_string(ika->controller) +
                                              " is not among the members");
      }
    } else if (const auto* join = std::get_if<JoinEvent>(&script[i])) {
      if (join->joiners.empty()) {
        throw Error(ErrorCode::kScenario,
                    "event " + std::to_string(i) + ": join without joiners");
      }
      for (const MemberSpec& m : join->joiners) claim(m.id, i);
    }
  }
}

Script parse_script(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kParse, "scenario must be a JSON array of events");
  Script script;
  try {
    for (std::size_t i = 0; i < j.size(); ++i) script.push_back(event_from_json(j[i], i));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed scenario: ") + e.what());
  }
  validate_script(script);
  return script;
}

Script parse_script_text(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("scenario is not valid JSON: ") + e.what());
  }
  return parse_script(j);
}

Script load_script(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kScenario, "scenario not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_script_text(buffer.str());
}

Json to_json(const Script& script) {
  Json arr = Json::array();
  for (const ScenarioEvent& event : script) {
    Json o;
    o["kind"] = event_kind(event);
    if (const auto* e = std::get_if<IkaEvent>(&event)) {
      o["variant"] = to_string(e->variant);
      o["controller"] = e->controller.value;
      o["members"] = members_to_json(e->members);
      fresh_to_json(o, e->fresh);
    } else if (const auto* e = std::get_if<RekeyEvent>(&event)) {
      o["controller"] = e->controller.value;
      fresh_to_json(o, e->fresh);
    } else if (const auto* e = std::get_if<EvictEvent>(&event)) {
      o["controller"] = e->controller.value;
      Json leavers = Json::array();
      for (MemberId id : e->leavers) leavers.push_back(id.value);
      o["leavers"] = std::move(leavers);
      fresh_to_json(o, e->fresh);
    } else if (const auto* e = std::get_if<JoinEvent>(&event)) {
      o["collector"] = e->collector.value;
      o["joiners"] = members_to_json(e->joiners);
      fresh_to_json(o, e->fresh);
    }
    arr.push_back(std::move(o));
  }
  return arr;
}

}  // namespace gke

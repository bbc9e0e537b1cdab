#include "gke/verify.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gke/error.hpp"
#include "gke/wire.hpp"

namespace gke {
namespace {

Error record_error(const TranscriptRecord& record, const std::string& why) {
  return Error(ErrorCode::kParse, "transcript record seq " + std::to_string(record.seq) + ": " + why);
}

const Json& oracle_field(const TranscriptRecord& record, const char* name) {
  if (!record.oracle.is_object() || !record.oracle.contains(name)) {
    throw record_error(record, std::string("oracle section lacks '") + name + "'");
  }
  return record.oracle.at(name);
}

PrivatePair pair_from_json(const Group& group, const Json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("x")) {
    throw Error(ErrorCode::kParse, "private pair needs r and x");
  }
  return PrivatePair{scalar_from_json(group, j.at("r")), scalar_from_json(group, j.at("x"))};
}

std::map<MemberId, PrivatePair> pairs_from_json(const Group& group, const Json& j) {
  std::map<MemberId, PrivatePair> out;
  for (const auto& [key, value] : j.items()) {
    out.emplace(member_id_from_json(Json(key)), pair_from_json(group, value));
  }
  return out;
}

// Decodes every wire element of a record; returns the first failure, if any.
std::optional<std::string> membership_failure(const Group& group, const TranscriptRecord& record) {
  try {
    if (record.kind == "public_keys") {
      public_keys_from_json(group, record.payload);
    } else if (record.kind == "partial" || record.kind == "blinded_partial") {
      element_from_json(group, record.payload);
    } else if (record.kind == "petition") {
      join_petition_from_json(group, record.payload);
    } else if (record.kind == "keying") {
      keying_message_from_json(group, record.payload);
    } else if (record.kind == "attack") {
      if (record.payload.contains("candidate")) {
        element_from_json(group, record.payload.at("candidate"));
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kMembership || e.code() == ErrorCode::kDecode) return e.what();
    throw record_error(record, e.what());
  }
  return std::nullopt;
}

class Verifier {
 public:
  explicit Verifier(const Group& group) : group_(group), oracle_(group) {}

  VerifyReport run(const Transcript& transcript) {
    std::uint64_t last_epoch = 0;
    for (const TranscriptRecord& record : transcript.records) {
      if (record.epoch < last_epoch) {
        fail("epoch-order", record.epoch, record.sender,
             "record seq " + std::to_string(record.seq) + " goes back from epoch " +
                 std::to_string(last_epoch));
      }
      last_epoch = std::max(last_epoch, record.epoch);

      const auto bad = membership_failure(group_, record);
      add({"membership", record.epoch, record.sender, !bad,
           bad ? "record seq " + std::to_string(record.seq) + ": " + *bad : ""});

      if (record.kind == "public_keys") {
        if (!record.sender) throw record_error(record, "publication without a sender");
        initial_.insert_or_assign(*record.sender, pair_from_json(group_, record.oracle));
      } else if (record.kind == "petition") {
        if (!record.sender) throw record_error(record, "petition without a sender");
        joiners_.insert_or_assign(*record.sender, pair_from_json(group_, record.oracle));
      } else if (record.kind == "keying") {
        keying(record, bad.has_value());
      }
    }
    return std::move(report_);
  }

 private:
  void add(CheckResult result) { report_.checks.push_back(std::move(result)); }

  void fail(const std::string& check, std::uint64_t epoch, std::optional<MemberId> member,
            const std::string& detail) {
    add({check, epoch, member, false, detail});
  }

  void expect(bool ok, const std::string& check, std::uint64_t epoch,
              std::optional<MemberId> member, const std::string& detail) {
    add({check, epoch, member, ok, ok ? "" : detail});
  }

  void keying(const TranscriptRecord& record, bool undecodable) {
    if (!record.sender) throw record_error(record, "keying broadcast without a sender");
    const MemberId controller = *record.sender;
    const Variant variant = parse_variant(record.payload.at("variant").get<std::string>());
    const std::uint64_t epoch = record.payload.at("epoch").get<std::uint64_t>();
    const PrivatePair fresh = pair_from_json(group_, oracle_field(record, "fresh"));

    std::vector<MemberId> roster;
    for (const Json& id : record.payload.at("roster")) roster.push_back(member_id_from_json(id));

    // Advance the exponent oracle from raw scalars.
    if (variant == Variant::kP1 || variant == Variant::kP2) {
      auto pairs = initial_;
      pairs.insert_or_assign(controller, pair_from_json(group_, oracle_field(record, "consumed")));
      oracle_.ika(variant, controller, pairs, fresh);
      initial_.clear();
    } else if (!oracle_.started()) {
      throw record_error(record, "rekey before initial key agreement");
    } else if (variant == Variant::kP3) {
      std::set<MemberId> leavers;
      for (const auto& [id, pair] : oracle_.pairs()) {
        if (!std::binary_search(roster.begin(), roster.end(), id)) leavers.insert(id);
      }
      oracle_.rekey(controller, fresh, leavers);
    } else {
      oracle_.join(controller, fresh, joiners_);
      joiners_.clear();
    }

    const bool ika = variant == Variant::kP1 || variant == Variant::kP2;
    expect(ika ? epoch == 1 : last_keying_epoch_ && epoch == *last_keying_epoch_ + 1,
           "epoch-chain", epoch, std::nullopt,
           "epoch " + std::to_string(epoch) + " does not follow " +
               (last_keying_epoch_ ? std::to_string(*last_keying_epoch_) : std::string("none")));
    expect(record.epoch == epoch, "epoch-chain", epoch, std::nullopt,
           "record epoch " + std::to_string(record.epoch) + " differs from payload epoch");
    last_keying_epoch_ = epoch;

    std::vector<MemberId> expected_roster;
    for (const auto& [id, pair] : oracle_.pairs()) expected_roster.push_back(id);
    expect(roster == expected_roster, "roster", epoch, std::nullopt,
           "roster differs from the membership implied by the oracle");

    const Element key = oracle_.key();
    const Element claimed = element_from_json(group_, oracle_field(record, "controller_key"));
    expect(claimed == key, "controller-key", epoch, controller,
           "controller key differs from the key recomputed from raw scalars");

    if (undecodable) {
      fail("slot-identity", epoch, std::nullopt, "skipped: message holds non-member elements");
      return;
    }
    const KeyingMessage msg = keying_message_from_json(group_, record.payload);
    expect(msg.R == oracle_.R(), "chain-R", epoch, std::nullopt, "R differs from g^(log R)");
    expect(msg.S == oracle_.S(), "chain-S", epoch, std::nullopt, "S differs from g^(log S)");

    std::vector<MemberId> slot_ids;
    for (const auto& [id, y] : msg.slots) slot_ids.push_back(id);
    expect(slot_ids == roster, "roster", epoch, std::nullopt, "slots do not match the roster");

    const Json& derived = oracle_field(record, "derived_keys");
    for (const auto& [id, pair] : oracle_.pairs()) {
      const auto slot = msg.slots.find(id);
      if (slot == msg.slots.end()) {
        fail("slot-identity", epoch, id, "no slot for " + to_string(id));
        continue;
      }
      expect(recovery_value(group_, msg, slot->second, pair.r, pair.x) == key, "slot-identity",
             epoch, id, "Y*S^x*R^r of " + to_string(id) + " is not the epoch key");
      const std::string name = std::to_string(id.value);
      bool agreed = false;
      if (derived.contains(name)) {
        try {
          agreed = element_from_json(group_, derived.at(name)) == key;
        } catch (const Error&) {
          agreed = false;
        }
      }
      expect(agreed, "agreement", epoch, id, to_string(id) + " derived a different key");
    }
  }

  const Group& group_;
  ExponentOracle oracle_;
  VerifyReport report_;
  std::map<MemberId, PrivatePair> initial_;
  std::map<MemberId, PrivatePair> joiners_;
  std::optional<std::uint64_t> last_keying_epoch_;
};

}  // namespace

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

VerifyReport verify_transcript(const Transcript& transcript, const Group& group) {
  try {
    return Verifier(group).run(transcript);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed transcript: ") + e.what());
  }
}

std::vector<EpochSummary> summarize(const Transcript& transcript, const Group& group) {
  std::vector<EpochSummary> out;
  for (const TranscriptRecord& record : transcript.records) {
    if (record.kind != "keying") continue;
    if (!record.sender) throw record_error(record, "keying broadcast without a sender");
    const KeyingMessage msg = keying_message_from_json(group, record.payload);
    out.push_back({msg.epoch, msg.variant, *record.sender, msg.roster.size(),
                   element_from_json(group, oracle_field(record, "controller_key"))});
  }
  return out;
}

std::string fingerprint(const Group& group, const Element& key) {
  return group.to_hex(key).substr(8, 8);
}

SecrecyReport probe_membership_secrecy(const Transcript& transcript, const Group& group) {
  struct Broadcast {
    std::uint64_t seq;
    KeyingMessage msg;
    Element key;
    std::map<MemberId, PrivatePair> pairs;
  };
  SecrecyReport report;
  std::vector<Broadcast> history;
  std::map<MemberId, PrivatePair> evicted;

  auto probe = [&](bool eviction, MemberId prober, const PrivatePair& prober_pair,
                   const Broadcast& b) {
    for (const auto& [owner, slot] : b.msg.slots) {
      eviction ? ++report.eviction_probes : ++report.join_probes;
      if (recovery_value(group, b.msg, slot, prober_pair.r, prober_pair.x) == b.key) {
        report.hits.push_back({eviction, prober, prober_pair, b.seq, b.msg.epoch, owner,
                               b.pairs.at(owner)});
      }
    }
  };

  for (const TranscriptRecord& record : transcript.records) {
    if (record.kind == "petition") {
      const PrivatePair pair = pair_from_json(group, record.oracle);
      for (const Broadcast& b : history) probe(false, *record.sender, pair, b);
      continue;
    }
    if (record.kind != "keying") continue;
    Broadcast b{record.seq, keying_message_from_json(group, record.payload),
                element_from_json(group, oracle_field(record, "controller_key")),
                pairs_from_json(group, oracle_field(record, "pairs"))};
    if (!history.empty()) {
      for (const auto& [id, pair] : history.back().pairs) {
        if (!b.pairs.contains(id)) evicted.insert_or_assign(id, pair);
      }
    }
    for (const auto& [id, pair] : evicted) probe(true, id, pair, b);
    history.push_back(std::move(b));
  }
  return report;
}

}  // namespace gke

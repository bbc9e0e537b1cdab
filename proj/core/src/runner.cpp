#include "gke/runner.hpp"

#include <map>
#include <optional>
#include <sstream>

#include "gke/adversary.hpp"
#include "gke/bus.hpp"
#include "gke/oracle.hpp"
#include "gke/wire.hpp"

namespace gke {
namespace {

Json pair_json(const Scalar& r, const Scalar& x) {
  Json j;
  j["r"] = scalar_to_json(r);
  j["x"] = scalar_to_json(x);
  return j;
}

class Simulation {
 public:
  Simulation(const Group& group, std::uint64_t seed) : group_(group), rng_(seed), oracle_(group) {}

  void run(const ScenarioEvent& event) {
    std::visit([this](const auto& e) { handle(e); }, event);
  }

  Transcript take() { return std::move(transcript_); }

 private:
  struct Created {
    MemberState state;
    bool pinned;
  };

  Created create_member(const MemberSpec& spec) {
    const Scalar r = spec.r ? group_.scalar(*spec.r) : group_.sample_scalar(rng_);
    const Scalar x = spec.x ? group_.scalar(*spec.x) : group_.sample_scalar(rng_);
    return {make_member(spec.id, make_key_pair(group_, r, x)), spec.r || spec.x};
  }

  KeyPair fresh_pair(const std::optional<PinnedPair>& pinned) {
    if (pinned) return make_key_pair(group_, group_.scalar(pinned->r), group_.scalar(pinned->x));
    return sample_key_pair(group_, rng_);
  }

  MemberState& member(MemberId id) {
    const auto it = members_.find(id);
    if (it == members_.end()) {
      throw Error(ErrorCode::kNotAMember, to_string(id) + " is not a current member");
    }
    return it->second;
  }

  void record(const Envelope& env, std::uint64_t epoch, Json oracle) {
    TranscriptRecord rec{.seq = transcript_.records.size() + 1,
                         .epoch = epoch,
                         .direction = env.direction,
                         .sender = env.sender,
                         .receiver = env.receiver,
                         .kind = env.kind,
                         .payload = env.payload,
                         .oracle = std::move(oracle)};
    transcript_.records.push_back(std::move(rec));
  }

  // Delivers a round and writes it to the transcript in delivery order.
  void send_round(std::vector<Envelope> round, std::uint64_t epoch,
                  std::map<MemberId, Json> oracle_by_sender) {
    Bus::order_round(round);
    for (const Envelope& env : round) {
      bus_.deliver(env);
      auto it = oracle_by_sender.find(env.sender);
      record(env, epoch, it == oracle_by_sender.end() ? Json() : std::move(it->second));
    }
  }

  std::vector<Envelope> inbox_of_kind(MemberId id, std::string_view kind) {
    std::vector<Envelope> out;
    for (Envelope& env : bus_.take_inbox(id)) {
      if (env.kind == kind) out.push_back(std::move(env));
    }
    return out;
  }

  // Broadcasts a keying message, lets every member recover from what it
  // received, and cross-checks everything against the oracle.
  void broadcast_keying(MemberId controller, const KeyingOutput& out, const KeyPair& consumed,
                        const KeyPair& fresh, bool fresh_pinned) {
    Envelope env{.direction = Direction::kBroadcast,
                 .sender = controller,
                 .receiver = std::nullopt,
                 .kind = "keying",
                 .payload = to_json(group_, out.message)};
    bus_.deliver(env);

    Json derived = Json::object();
    for (auto& [id, state] : members_) {
      auto received = inbox_of_kind(id, "keying");
      if (received.size() != 1) {
        throw Error(ErrorCode::kInvariant,
                    to_string(id) + " received " + std::to_string(received.size()) +
                        " keying messages, expected 1");
      }
      const KeyingMessage msg = keying_message_from_json(group_, received.front().payload);
      derived[std::to_string(id.value)] = element_to_json(group_, recover(group_, state, msg));
      state.role = id == controller ? Role::kController : Role::kMember;
    }
    check_epoch(out);

    Json oracle;
    oracle["controller_key"] = element_to_json(group_, out.key);
    oracle["expected_key"] = element_to_json(group_, oracle_.key());
    oracle["consumed"] = pair_json(consumed.r, consumed.x);
    Json f = pair_json(fresh.r, fresh.x);
    f["pinned"] = fresh_pinned;
    oracle["fresh"] = std::move(f);
    oracle["derived_keys"] = std::move(derived);
    Json pairs = Json::object();
    for (const auto& [id, pair] : oracle_.pairs()) {
      pairs[std::to_string(id.value)] = pair_json(pair.r, pair.x);
    }
    oracle["pairs"] = std::move(pairs);
    record(env, out.message.epoch, std::move(oracle));
    last_ = out.message;
  }

  [[noreturn]] void invariant_failure(const std::string& what, const KeyingMessage& msg) {
    std::ostringstream dump;
    dump << "invariant violated at epoch " << msg.epoch << " (" << to_string(msg.variant)
         << "): " << what << "\n  message: " << canonical(to_json(group_, msg))
         << "\n  oracle key: " << group_.to_hex(oracle_.key());
    throw Error(ErrorCode::kInvariant, dump.str());
  }

  void check_epoch(const KeyingOutput& out) {
    const KeyingMessage& msg = out.message;
    const Element expected = oracle_.key();
    if (!(out.key == expected)) invariant_failure("controller key differs from oracle", msg);
    if (!(msg.R == oracle_.R())) invariant_failure("R differs from oracle", msg);
    if (msg.S != oracle_.S()) invariant_failure("S differs from oracle", msg);
    if (last_ && msg.epoch != last_->epoch + 1) invariant_failure("epoch does not chain", msg);
    if (msg.slots.size() != members_.size() || oracle_.pairs().size() != members_.size()) {
      invariant_failure("roster size mismatch", msg);
    }
    for (const auto& [id, state] : members_) {
      if (!state.key || !(*state.key == expected)) {
        invariant_failure("agreement failed for " + to_string(id), msg);
      }
      const PrivatePair& pair = oracle_.pairs().at(id);
      if (!(pair.r == state.pair.r) || !(pair.x == state.pair.x)) {
        invariant_failure("effective pair of " + to_string(id) + " differs from oracle", msg);
      }
      const auto slot = msg.slots.find(id);
      if (slot == msg.slots.end() ||
          !(recovery_value(group_, msg, slot->second, pair.r, pair.x) == expected)) {
        invariant_failure("slot identity failed for " + to_string(id), msg);
      }
    }
  }

  void handle(const IkaEvent& e) {
    std::map<MemberId, Json> publish_oracle;
    std::map<MemberId, PrivatePair> initial;
    for (const MemberSpec& spec : e.members) {
      Created c = create_member(spec);
      Json o = pair_json(c.state.pair.r, c.state.pair.x);
      o["pinned"] = c.pinned;
      publish_oracle.emplace(spec.id, std::move(o));
      initial.emplace(spec.id, PrivatePair{c.state.pair.r, c.state.pair.x});
      bus_.join(spec.id);
      members_.emplace(spec.id, std::move(c.state));
    }
    publish_oracle.erase(e.controller);

    // Round one: everyone but the controller publishes.
    std::vector<Envelope> round;
    for (const auto& [id, state] : members_) {
      if (id == e.controller) continue;
      round.push_back({Direction::kPublish, id, std::nullopt, "public_keys",
                       to_json(group_, publish_keys(state, e.variant))});
    }
    send_round(std::move(round), 0, std::move(publish_oracle));

    auto collect_published = [this](MemberId id) {
      PublishedKeys published;
      for (const Envelope& env : inbox_of_kind(id, "public_keys")) {
        published.emplace(env.sender, public_keys_from_json(group_, env.payload));
      }
      return published;
    };

    // Round two: partials (blinded for the distributed variant) to the controller.
    const PublishedKeys controller_view = collect_published(e.controller);
    const char* partial_kind = e.variant == Variant::kP1 ? "partial" : "blinded_partial";
    round.clear();
    for (const auto& [id, state] : members_) {
      if (id == e.controller) continue;
      const PublishedKeys view = collect_published(id);
      const Element value = e.variant == Variant::kP1
                                ? partial_product(group_, state, view, e.controller)
                                : ika2_blinded_partial(group_, state, view, e.controller);
      round.push_back(
          {Direction::kUnicast, id, e.controller, partial_kind, element_to_json(group_, value)});
    }
    send_round(std::move(round), 0, {});

    MemberElements partials;
    for (const Envelope& env : inbox_of_kind(e.controller, partial_kind)) {
      partials.emplace(env.sender, element_from_json(group_, env.payload));
    }

    MemberState& controller = member(e.controller);
    const KeyPair consumed = controller.pair;
    const KeyPair fresh = fresh_pair(e.fresh);
    const KeyingOutput out =
        e.variant == Variant::kP1
            ? ika1_build_keying(group_, controller, controller_view, partials, fresh)
            : ika2_build_keying(group_, controller, controller_view, partials, fresh);
    oracle_.ika(e.variant, e.controller, initial, PrivatePair{fresh.r, fresh.x});
    last_ika_ = out.message;
    last_ika_controller_ = e.controller;
    broadcast_keying(e.controller, out, consumed, fresh, e.fresh.has_value());
  }

  void handle(const RekeyEvent& e) {
    MemberState& controller = member(e.controller);
    const KeyPair consumed = controller.pair;
    const KeyPair fresh = fresh_pair(e.fresh);
    const KeyingOutput out = aka_rekey(group_, controller, *last_, *controller.key, fresh);
    oracle_.rekey(e.controller, PrivatePair{fresh.r, fresh.x}, {});
    broadcast_keying(e.controller, out, consumed, fresh, e.fresh.has_value());
  }

  void handle(const EvictEvent& e) {
    MemberState& controller = member(e.controller);
    const KeyPair consumed = controller.pair;
    const KeyPair fresh = fresh_pair(e.fresh);
    const KeyingOutput out =
        rekey_evict(group_, controller, *last_, *controller.key, e.leavers, fresh);
    for (MemberId id : e.leavers) {
      bus_.leave(id);
      members_.erase(id);
    }
    oracle_.rekey(e.controller, PrivatePair{fresh.r, fresh.x}, e.leavers);
    broadcast_keying(e.controller, out, consumed, fresh, e.fresh.has_value());
  }

  void handle(const JoinEvent& e) {
    if (!members_.contains(e.collector)) {
      throw Error(ErrorCode::kNotAMember, "collector " + to_string(e.collector) +
                                              " is not a current member");
    }
    std::vector<Envelope> round;
    std::map<MemberId, Json> petition_oracle;
    std::map<MemberId, PrivatePair> joiners;
    for (const MemberSpec& spec : e.joiners) {
      if (members_.contains(spec.id)) {
        throw Error(ErrorCode::kRosterConflict, to_string(spec.id) + " is already a member");
      }
      Created c = create_member(spec);
      bus_.join(spec.id);
      const JoinPetition petition = join_petition(group_, c.state, last_->R, last_->S);
      round.push_back({Direction::kUnicast, spec.id, e.collector, "petition",
                       to_json(group_, petition)});
      Json o = pair_json(c.state.pair.r, c.state.pair.x);
      o["pinned"] = c.pinned;
      petition_oracle.emplace(spec.id, std::move(o));
      joiners.emplace(spec.id, PrivatePair{c.state.pair.r, c.state.pair.x});
      members_.emplace(spec.id, std::move(c.state));
    }
    send_round(std::move(round), last_->epoch, std::move(petition_oracle));

    std::vector<JoinPetition> petitions;
    for (const Envelope& env : inbox_of_kind(e.collector, "petition")) {
      petitions.push_back(join_petition_from_json(group_, env.payload));
    }
    MemberState& collector = member(e.collector);
    const KeyPair consumed = collector.pair;
    const KeyPair fresh = fresh_pair(e.fresh);
    const KeyingOutput out =
        join_rekey(group_, collector, *last_, *collector.key, petitions, fresh);
    oracle_.join(e.collector, PrivatePair{fresh.r, fresh.x}, joiners);
    broadcast_keying(e.collector, out, consumed, fresh, e.fresh.has_value());
  }

  void handle(const AttackDemoEvent&) {
    Json payload;
    std::uint64_t target = 0;
    for (const auto& rec : transcript_.records) {
      if (rec.kind == "keying" && rec.epoch == 1) target = rec.seq;
    }
    payload["target_seq"] = target;
    Json oracle;
    try {
      const Element candidate = attack_real_protocol(group_, *last_ika_, last_ika_controller_);
      payload["applicable"] = true;
      payload["candidate"] = element_to_json(group_, candidate);
      const Element truth = element_from_json(
          group_, transcript_.records.at(target - 1).oracle.at("controller_key"));
      oracle["matches_true_key"] = candidate == truth;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kAttackInapplicable && err.code() != ErrorCode::kDegenerate) {
        throw;
      }
      payload["applicable"] = false;
      oracle["matches_true_key"] = false;
    }
    TranscriptRecord rec{.seq = transcript_.records.size() + 1,
                         .epoch = last_->epoch,
                         .direction = Direction::kPublish,
                         .sender = std::nullopt,
                         .receiver = std::nullopt,
                         .kind = "attack",
                         .payload = std::move(payload),
                         .oracle = std::move(oracle)};
    transcript_.records.push_back(std::move(rec));
  }

  const Group& group_;
  Rng rng_;
  Bus bus_;
  ExponentOracle oracle_;
  Transcript transcript_;
  std::map<MemberId, MemberState> members_;
  std::optional<KeyingMessage> last_;
  std::optional<KeyingMessage> last_ika_;
  MemberId last_ika_controller_;
};

}  // namespace

Transcript run_scenario(const Script& script, const Group& group, std::uint64_t seed) {
  validate_script(script);
  Simulation sim(group, seed);
  for (std::size_t i = 0; i < script.size(); ++i) {
    try {
      sim.run(script[i]);
    } catch (const Error& e) {
      throw ScenarioError(e.code(), i,
                          "event " + std::to_string(i) + " (" +
                              std::string(event_kind(script[i])) + "): " + e.what());
    }
  }
  return sim.take();
}

}  // namespace gke

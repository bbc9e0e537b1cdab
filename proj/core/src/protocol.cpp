#include "gke/protocol.hpp"

#include <algorithm>

#include "gke/error.hpp"

namespace gke {
namespace {

// S on two-key chains; R stands in for it on chains started by the
// distributed IKA.
const Element& second_base(const KeyingMessage& msg) { return msg.S ? *msg.S : msg.R; }

void require_nonzero_exponent(const Scalar& r, const char* what) {
  if (r.is_zero()) {
    throw Error(ErrorCode::kDegenerate, std::string(what) + " must be non-zero");
  }
}

void require_in_roster(const KeyingMessage& prev, MemberId id) {
  if (!std::binary_search(prev.roster.begin(), prev.roster.end(), id)) {
    throw Error(ErrorCode::kNotAMember,
                "member " + to_string(id) + " is not in the epoch-" +
                    std::to_string(prev.epoch) + " roster");
  }
}

void install_fresh_pair(MemberState& controller, const KeyPair& fresh, const Element& key,
                        std::uint64_t epoch) {
  controller.pair = fresh;
  controller.key = key;
  controller.epoch = epoch;
  controller.role = Role::kController;
}

// Members other than the controller, ascending.
std::vector<MemberId> others(const PublishedKeys& published, MemberId controller) {
  std::vector<MemberId> ids;
  for (const auto& [id, keys] : published) {
    if (id != controller) ids.push_back(id);
  }
  return ids;
}

Element product_of_pub_r(const Group& group, const PublishedKeys& published, MemberId controller,
                         std::optional<MemberId> skip) {
  Element acc = group.identity();
  for (const auto& [id, keys] : published) {
    if (id == controller || (skip && id == *skip)) continue;
    acc = group.mul(acc, keys.pub_r);
  }
  return acc;
}

void require_member_published(const PublishedKeys& published, MemberId member,
                              MemberId controller) {
  if (member != controller && !published.contains(member)) {
    throw Error(ErrorCode::kIncompleteRoster,
                "member " + to_string(member) + " has not published its keys");
  }
}

std::vector<MemberId> ika_roster(const std::vector<MemberId>& non_controllers,
                                 MemberId controller) {
  std::vector<MemberId> roster = non_controllers;
  roster.push_back(controller);
  std::sort(roster.begin(), roster.end());
  return roster;
}

void check_contributions(const std::vector<MemberId>& non_controllers,
                         const MemberElements& contributions, const char* what) {
  if (non_controllers.empty()) {
    throw Error(ErrorCode::kIncompleteRoster, "key agreement needs at least two members");
  }
  for (MemberId id : non_controllers) {
    if (!contributions.contains(id)) {
      throw Error(ErrorCode::kIncompleteRoster,
                  std::string("missing ") + what + " from member " + to_string(id));
    }
  }
  for (const auto& [id, value] : contributions) {
    if (!std::binary_search(non_controllers.begin(), non_controllers.end(), id)) {
      throw Error(ErrorCode::kRosterConflict,
                  std::string(what) + " from member " + to_string(id) + " outside the roster");
    }
  }
}

KeyingOutput rekey_impl(const Group& group, MemberState& controller, const KeyingMessage& prev,
                        const Element& prev_key, const std::set<MemberId>& leavers,
                        const KeyPair& fresh) {
  require_in_roster(prev, controller.id);
  require_nonzero_exponent(fresh.r, "fresh controller exponent r'");

  std::size_t removed = 0;
  for (MemberId leaver : leavers) {
    if (!std::binary_search(prev.roster.begin(), prev.roster.end(), leaver)) {
      throw Error(ErrorCode::kInvalidEviction,
                  "cannot evict " + to_string(leaver) + ": not in the roster");
    }
    ++removed;
  }
  if (removed == prev.roster.size()) {
    throw Error(ErrorCode::kEmptyRoster, "eviction would leave the roster empty");
  }
  if (leavers.contains(controller.id)) {
    throw Error(ErrorCode::kInvalidEviction,
                "the acting controller " + to_string(controller.id) + " cannot evict itself");
  }

  const Scalar& r_new = fresh.r;
  const Scalar& x_new = fresh.x;

  KeyingMessage msg{.epoch = prev.epoch + 1,
                    .variant = Variant::kP3,
                    .roster = {},
                    .slots = {},
                    .R = group.exp(prev.R, r_new),
                    .S = std::nullopt};
  if (prev.S) msg.S = group.exp(*prev.S, r_new);

  const Element key = group.exp(prev_key, r_new);
  for (MemberId id : prev.roster) {
    if (leavers.contains(id)) continue;
    msg.roster.push_back(id);
    if (id == controller.id) continue;
    const auto it = prev.slots.find(id);
    if (it == prev.slots.end()) {
      throw Error(ErrorCode::kNoSlot, "previous message lacks a slot for " + to_string(id));
    }
    msg.slots.emplace(id, group.exp(it->second, r_new));
  }
  // K_t * R_{t-1}^{-r'r'} * S_{t-1}^{-r'x'}
  const Element own = group.mul(
      key, group.mul(group.exp(prev.R, group.scalar_neg(group.scalar_mul(r_new, r_new))),
                     group.exp(second_base(prev), group.scalar_neg(group.scalar_mul(r_new, x_new)))));
  msg.slots.emplace(controller.id, own);

  install_fresh_pair(controller, fresh, key, msg.epoch);
  return {std::move(msg), key};
}

}  // namespace

std::string to_string(MemberId id) { return "U" + std::to_string(id.value); }

KeyPair make_key_pair(const Group& group, const Scalar& r, const Scalar& x) {
  return KeyPair{.r = r, .x = x, .pub_r = group.exp_g(r), .pub_x = group.exp_g(x)};
}

KeyPair sample_key_pair(const Group& group, Rng& rng) {
  Scalar r = group.sample_scalar(rng);
  Scalar x = group.sample_scalar(rng);
  return make_key_pair(group, r, x);
}

MemberState make_member(MemberId id, KeyPair pair) {
  return MemberState{
      .id = id, .pair = std::move(pair), .epoch = 0, .key = std::nullopt, .role = Role::kMember};
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kP1: return "P1";
    case Variant::kP2: return "P2";
    case Variant::kP3: return "P3";
    case Variant::kP4: return "P4";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  if (text == "P1") return Variant::kP1;
  if (text == "P2") return Variant::kP2;
  if (text == "P3") return Variant::kP3;
  if (text == "P4") return Variant::kP4;
  throw Error(ErrorCode::kParse, "unknown variant '" + std::string(text) + "'");
}

PublicKeys publish_keys(const MemberState& member, Variant variant) {
  PublicKeys keys{.pub_r = member.pair.pub_r, .pub_x = std::nullopt};
  if (variant != Variant::kP2) keys.pub_x = member.pair.pub_x;
  return keys;
}

Element partial_product(const Group& group, const MemberState& member,
                        const PublishedKeys& published, MemberId controller) {
  require_member_published(published, member.id, controller);
  return product_of_pub_r(group, published, controller, member.id);
}

KeyingOutput ika1_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& partials,
                               const KeyPair& fresh) {
  const KeyPair& own = controller.pair;
  require_nonzero_exponent(own.r, "controller exponent r");
  require_nonzero_exponent(fresh.r, "fresh controller exponent r'");
  const auto ids = others(published, controller.id);
  check_contributions(ids, partials, "partial");

  const Element total = product_of_pub_r(group, published, controller.id, std::nullopt);
  const Element key = group.exp(total, own.r);
  const Scalar neg_x = group.scalar_neg(own.x);

  KeyingMessage msg{.epoch = 1,
                    .variant = Variant::kP1,
                    .roster = ika_roster(ids, controller.id),
                    .slots = {},
                    .R = own.pub_r,
                    .S = own.pub_x};
  for (MemberId id : ids) {
    const PublicKeys& keys = published.at(id);
    if (!keys.pub_x) {
      throw Error(ErrorCode::kIncompleteRoster,
                  "member " + to_string(id) + " did not publish g^x");
    }
    const Element& partial = partials.at(id);
    if (!(partial == group.mul(total, group.invert(keys.pub_r)))) {
      throw Error(ErrorCode::kInconsistentPartial,
                  "partial from " + to_string(id) + " disagrees with the published keys");
    }
    // g^{-x_c x_i} * partial^{r_c}
    msg.slots.emplace(id, group.mul(group.exp(*keys.pub_x, neg_x), group.exp(partial, own.r)));
  }
  // K * g^{-r' r_c} * g^{-x' x_c}
  msg.slots.emplace(controller.id,
                    group.mul(key, group.mul(group.exp(msg.R, group.scalar_neg(fresh.r)),
                                             group.exp(*msg.S, group.scalar_neg(fresh.x)))));

  install_fresh_pair(controller, fresh, key, msg.epoch);
  return {std::move(msg), key};
}

KeyingOutput ika1_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& partials,
                               Rng& rng) {
  return ika1_build_keying(group, controller, published, partials, sample_key_pair(group, rng));
}

Element recovery_value(const Group& group, const KeyingMessage& msg, const Element& slot,
                       const Scalar& r, const Scalar& x) {
  return group.mul(slot, group.mul(group.exp(second_base(msg), x), group.exp(msg.R, r)));
}

Element recover_key(const Group& group, MemberState& member, const KeyingMessage& msg) {
  if (!msg.S) {
    throw Error(ErrorCode::kVariantMismatch,
                "message at epoch " + std::to_string(msg.epoch) + " carries no S value");
  }
  return recover(group, member, msg);
}

Element ika2_recover(const Group& group, MemberState& member, const KeyingMessage& msg) {
  if (msg.S) {
    throw Error(ErrorCode::kVariantMismatch,
                "message at epoch " + std::to_string(msg.epoch) + " belongs to a two-key chain");
  }
  return recover(group, member, msg);
}

Element recover(const Group& group, MemberState& member, const KeyingMessage& msg) {
  const auto it = msg.slots.find(member.id);
  if (it == msg.slots.end()) {
    throw Error(ErrorCode::kNoSlot, "no slot for " + to_string(member.id) + " at epoch " +
                                        std::to_string(msg.epoch));
  }
  Element key = recovery_value(group, msg, it->second, member.pair.r, member.pair.x);
  member.key = key;
  member.epoch = msg.epoch;
  return key;
}

Element ika2_blinded_partial(const Group& group, const MemberState& member,
                             const PublishedKeys& published, MemberId controller) {
  const Element partial = partial_product(group, member, published, controller);
  return group.mul(partial, group.invert(member.pair.pub_x));
}

KeyingOutput ika2_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& blinded,
                               const KeyPair& fresh) {
  const KeyPair& own = controller.pair;
  require_nonzero_exponent(own.r, "controller exponent r");
  require_nonzero_exponent(fresh.r, "fresh controller exponent r'");
  const auto ids = others(published, controller.id);
  check_contributions(ids, blinded, "blinded partial");

  const Element key =
      group.exp(product_of_pub_r(group, published, controller.id, std::nullopt), own.r);

  KeyingMessage msg{.epoch = 1,
                    .variant = Variant::kP2,
                    .roster = ika_roster(ids, controller.id),
                    .slots = {},
                    .R = own.pub_r,
                    .S = std::nullopt};
  for (MemberId id : ids) {
    msg.slots.emplace(id, group.exp(blinded.at(id), own.r));
  }
  // K * g^{-r' r_c} * g^{-x' r_c}
  msg.slots.emplace(controller.id,
                    group.mul(key, group.exp(msg.R, group.scalar_neg(
                                                        group.scalar_add(fresh.r, fresh.x)))));

  install_fresh_pair(controller, fresh, key, msg.epoch);
  return {std::move(msg), key};
}

KeyingOutput ika2_build_keying(const Group& group, MemberState& controller,
                               const PublishedKeys& published, const MemberElements& blinded,
                               Rng& rng) {
  return ika2_build_keying(group, controller, published, blinded, sample_key_pair(group, rng));
}

KeyingOutput aka_rekey(const Group& group, MemberState& new_controller, const KeyingMessage& prev,
                       const Element& prev_key, const KeyPair& fresh) {
  return rekey_impl(group, new_controller, prev, prev_key, {}, fresh);
}

KeyingOutput aka_rekey(const Group& group, MemberState& new_controller, const KeyingMessage& prev,
                       const Element& prev_key, Rng& rng) {
  return aka_rekey(group, new_controller, prev, prev_key, sample_key_pair(group, rng));
}

KeyingOutput rekey_evict(const Group& group, MemberState& new_controller,
                         const KeyingMessage& prev, const Element& prev_key,
                         const std::set<MemberId>& leavers, const KeyPair& fresh) {
  return rekey_impl(group, new_controller, prev, prev_key, leavers, fresh);
}

KeyingOutput rekey_evict(const Group& group, MemberState& new_controller,
                         const KeyingMessage& prev, const Element& prev_key,
                         const std::set<MemberId>& leavers, Rng& rng) {
  return rekey_evict(group, new_controller, prev, prev_key, leavers, sample_key_pair(group, rng));
}

JoinPetition join_petition(const Group& group, const MemberState& joiner, const Element& R_t,
                           const std::optional<Element>& S_t) {
  const Element& s_base = S_t ? *S_t : R_t;
  return JoinPetition{.joiner = joiner.id,
                      .blinded_r = group.exp(R_t, joiner.pair.r),
                      .blinded_x = group.exp(s_base, joiner.pair.x)};
}

KeyingOutput join_rekey(const Group& group, MemberState& collector, const KeyingMessage& prev,
                        const Element& prev_key, const std::vector<JoinPetition>& petitions,
                        const KeyPair& fresh) {
  require_in_roster(prev, collector.id);
  if (petitions.empty()) {
    throw Error(ErrorCode::kDegenerateJoin, "join round without petitions");
  }
  std::set<MemberId> joiners;
  for (const JoinPetition& petition : petitions) {
    if (std::binary_search(prev.roster.begin(), prev.roster.end(), petition.joiner) ||
        !joiners.insert(petition.joiner).second) {
      throw Error(ErrorCode::kRosterConflict,
                  "joiner id " + to_string(petition.joiner) + " is already taken");
    }
  }
  require_nonzero_exponent(fresh.r, "fresh controller exponent r'");

  const Scalar& r_new = fresh.r;
  const Scalar neg_r_new = group.scalar_neg(r_new);

  // R_t^{sum of the joiners' r}
  Element blinding = group.identity();
  for (const JoinPetition& petition : petitions) {
    blinding = group.mul(blinding, petition.blinded_r);
  }
  const Element key = group.exp(group.mul(prev_key, blinding), r_new);

  KeyingMessage msg{.epoch = prev.epoch + 1,
                    .variant = Variant::kP4,
                    .roster = {},
                    .slots = {},
                    .R = group.exp(prev.R, r_new),
                    .S = std::nullopt};
  if (prev.S) msg.S = group.exp(*prev.S, r_new);

  for (MemberId id : prev.roster) {
    if (id == collector.id) continue;
    const auto it = prev.slots.find(id);
    if (it == prev.slots.end()) {
      throw Error(ErrorCode::kNoSlot, "previous message lacks a slot for " + to_string(id));
    }
    msg.slots.emplace(id, group.exp(group.mul(it->second, blinding), r_new));
  }
  msg.slots.emplace(
      collector.id,
      group.mul(key,
                group.mul(group.exp(prev.R, group.scalar_neg(group.scalar_mul(r_new, r_new))),
                          group.exp(second_base(prev),
                                    group.scalar_neg(group.scalar_mul(r_new, fresh.x))))));
  for (const JoinPetition& petition : petitions) {
    // K_{t+1} * (R_t^{r_j})^{-r'} * (S_t^{x_j})^{-r'}
    msg.slots.emplace(petition.joiner,
                      group.mul(key, group.mul(group.exp(petition.blinded_r, neg_r_new),
                                               group.exp(petition.blinded_x, neg_r_new))));
  }
  for (const auto& [id, slot] : msg.slots) msg.roster.push_back(id);

  install_fresh_pair(collector, fresh, key, msg.epoch);
  return {std::move(msg), key};
}

KeyingOutput join_rekey(const Group& group, MemberState& collector, const KeyingMessage& prev,
                        const Element& prev_key, const std::vector<JoinPetition>& petitions,
                        Rng& rng) {
  return join_rekey(group, collector, prev, prev_key, petitions, sample_key_pair(group, rng));
}

}  // namespace gke

#include "gke/adversary.hpp"

#include "gke/error.hpp"

namespace gke {
namespace {

Scalar inverse_of_n_minus_two(const Group& group, std::size_t n) {
  const Scalar e = group.scalar(mpz_class(static_cast<unsigned long>(n)) - 2);
  if (e.is_zero()) {
    throw Error(ErrorCode::kAttackInapplicable,
                "n - 2 = " + std::to_string(n - 2) + " is not invertible mod q");
  }
  return group.scalar_invert(e);
}

}  // namespace

SingleKeyOutput single_key_ika(const Group& group, const std::map<MemberId, Scalar>& scalars,
                               MemberId controller) {
  if (scalars.size() < 3) {
    throw Error(ErrorCode::kDegenerate, "single-key attack needs at least three members");
  }
  const auto own = scalars.find(controller);
  if (own == scalars.end()) {
    throw Error(ErrorCode::kNotAMember, "controller " + to_string(controller) + " has no scalar");
  }
  Scalar sum = group.scalar(0);
  for (const auto& [id, k] : scalars) {
    if (id != controller) sum = group.scalar_add(sum, k);
  }
  SingleKeyBroadcast broadcast{.controller = controller, .messages = {}, .n = scalars.size()};
  for (const auto& [id, k] : scalars) {
    if (id == controller) continue;
    broadcast.messages.emplace(
        id, group.exp_g(group.scalar_mul(own->second, group.scalar_sub(sum, k))));
  }
  return {std::move(broadcast), group.exp_g(group.scalar_mul(own->second, sum))};
}

Element product_attack(const Group& group, const SingleKeyBroadcast& broadcast) {
  const Scalar inv = inverse_of_n_minus_two(group, broadcast.n);
  Element product = group.identity();
  for (const auto& [id, d] : broadcast.messages) product = group.mul(product, d);
  return group.exp(product, inv);
}

Element attack_real_protocol(const Group& group, const KeyingMessage& msg, MemberId controller) {
  if (msg.variant != Variant::kP1 && msg.variant != Variant::kP2) {
    throw Error(ErrorCode::kVariantMismatch, "product attack targets IKA broadcasts only");
  }
  if (msg.slots.size() < 3) {
    throw Error(ErrorCode::kDegenerate, "product attack needs at least three members");
  }
  const Scalar inv = inverse_of_n_minus_two(group, msg.slots.size());
  Element product = group.identity();
  for (const auto& [id, y] : msg.slots) {
    if (id != controller) product = group.mul(product, y);
  }
  return group.exp(product, inv);
}

std::string AdversaryView::to_jsonl() const {
  Transcript t{records};
  return t.to_jsonl();
}

AdversaryView AdversaryView::from_jsonl(std::string_view text) {
  return capture_view(Transcript::from_jsonl(text));
}

AdversaryView capture_view(const Transcript& transcript) {
  return AdversaryView{transcript.without_oracle().records};
}

Json to_json(const AttackReport& report) {
  Json j;
  j["mode"] = report.mode;
  j["variant"] = report.variant;
  j["n"] = report.n;
  if (report.mode == "transcript") j["seq"] = report.seq;
  j["applicable"] = report.applicable;
  j["recovered"] = report.recovered;
  j["matches_true_key"] = report.matches_true_key;
  return j;
}

std::vector<AttackReport> attack_transcript(const Group& group, const Transcript& transcript) {
  std::vector<AttackReport> reports;
  for (const TranscriptRecord& record : transcript.records) {
    if (record.direction != Direction::kBroadcast || record.kind != "keying") continue;
    const KeyingMessage msg = keying_message_from_json(group, record.payload);
    if (msg.variant != Variant::kP1 && msg.variant != Variant::kP2) continue;
    if (!record.sender) throw Error(ErrorCode::kParse, "keying broadcast without a sender");

    AttackReport report{.mode = "transcript",
                        .variant = std::string(to_string(msg.variant)),
                        .n = msg.slots.size(),
                        .seq = record.seq};
    try {
      const Element candidate = attack_real_protocol(group, msg, *record.sender);
      report.applicable = true;
      if (record.oracle.is_object() && record.oracle.contains("controller_key")) {
        const Element truth = element_from_json(group, record.oracle.at("controller_key"));
        report.recovered = candidate == truth;
        report.matches_true_key = report.recovered;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kAttackInapplicable && e.code() != ErrorCode::kDegenerate) throw;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace gke

#include "gke/bus.hpp"

#include <algorithm>

#include "gke/error.hpp"

namespace gke {

void Bus::join(MemberId id) {
  if (!live_.insert(id).second) {
    throw Error(ErrorCode::kRosterConflict, to_string(id) + " is already on the bus");
  }
}

void Bus::leave(MemberId id) {
  live_.erase(id);
  inbox_.erase(id);
}

void Bus::push(MemberId receiver, const Envelope& message, std::vector<DeliveryRecord>& out) {
  inbox_[receiver].push_back(message);
  out.push_back({next_seq_++, message.sender, receiver, message.kind});
}

std::vector<DeliveryRecord> Bus::deliver(const Envelope& message) {
  if (!is_live(message.sender)) {
    throw Error(ErrorCode::kRouting, "unknown sender " + to_string(message.sender));
  }
  std::vector<DeliveryRecord> out;
  if (message.receiver) {
    if (!is_live(*message.receiver)) {
      throw Error(ErrorCode::kRouting, "unknown receiver " + to_string(*message.receiver));
    }
    push(*message.receiver, message, out);
    return out;
  }
  for (MemberId id : live_) push(id, message, out);
  return out;
}

void Bus::order_round(std::vector<Envelope>& round) {
  std::stable_sort(round.begin(), round.end(), [](const Envelope& a, const Envelope& b) {
    const bool a_bcast = a.direction == Direction::kBroadcast;
    const bool b_bcast = b.direction == Direction::kBroadcast;
    if (a_bcast != b_bcast) return b_bcast;
    if (a.sender != b.sender) return a.sender < b.sender;
    return a.receiver < b.receiver;
  });
}

std::vector<DeliveryRecord> Bus::deliver_round(std::vector<Envelope> round) {
  order_round(round);
  std::vector<DeliveryRecord> out;
  for (const Envelope& message : round) {
    auto records = deliver(message);
    out.insert(out.end(), records.begin(), records.end());
  }
  return out;
}

std::vector<Envelope> Bus::take_inbox(MemberId id) {
  auto it = inbox_.find(id);
  if (it == inbox_.end()) return {};
  std::vector<Envelope> out = std::move(it->second);
  inbox_.erase(it);
  return out;
}

}  // namespace gke

#pragma once

// Synchronous, loss-free in-memory message fabric. Within a round, publishes
// and unicasts go out in ascending sender id, broadcasts last; a broadcast
// fans out to every live member (sender included) in ascending id.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gke/protocol.hpp"
#include "gke/transcript.hpp"
#include "gke/wire.hpp"

namespace gke {

struct Envelope {
  Direction direction = Direction::kPublish;
  MemberId sender;
  std::optional<MemberId> receiver;  // empty: everyone
  std::string kind;
  Json payload;
};

struct DeliveryRecord {
  std::uint64_t seq = 0;
  MemberId sender;
  MemberId receiver;
  std::string kind;

  friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

class Bus {
 public:
  void join(MemberId id);
  void leave(MemberId id);
  bool is_live(MemberId id) const { return live_.contains(id); }
  const std::set<MemberId>& live() const { return live_; }

  /// Throws kRouting for an unknown sender or receiver.
  std::vector<DeliveryRecord> deliver(const Envelope& message);

  /// Orders the round (see above) and delivers every message.
  std::vector<DeliveryRecord> deliver_round(std::vector<Envelope> round);

  /// Removes and returns everything delivered to `id` so far.
  std::vector<Envelope> take_inbox(MemberId id);

  static void order_round(std::vector<Envelope>& round);

 private:
  void push(MemberId receiver, const Envelope& message, std::vector<DeliveryRecord>& out);

  std::set<MemberId> live_;
  std::map<MemberId, std::vector<Envelope>> inbox_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace gke

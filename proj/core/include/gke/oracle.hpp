#pragma once

// Omniscient bookkeeping in the exponent field. Tracks, from raw private
// scalars only, the discrete logs of K_t, R_t and S_t and every member's
// effective pair. It never looks at a keying message, so it is an
// independent route to the values the protocol computes with group
// operations.

#include <map>
#include <optional>
#include <set>

#include "gke/group.hpp"
#include "gke/protocol.hpp"

namespace gke {

struct PrivatePair {
  Scalar r;
  Scalar x;
};

class ExponentOracle {
 public:
  explicit ExponentOracle(const Group& group) : group_(&group) {}

  /// `pairs` holds every member's initial pair, the controller's included.
  void ika(Variant variant, MemberId controller, const std::map<MemberId, PrivatePair>& pairs,
           const PrivatePair& fresh);
  void rekey(MemberId controller, const PrivatePair& fresh, const std::set<MemberId>& leavers);
  void join(MemberId collector, const PrivatePair& fresh,
            const std::map<MemberId, PrivatePair>& joiners);

  bool started() const { return log_key_.has_value(); }
  bool two_key() const { return log_s_.has_value(); }
  std::uint64_t epoch() const { return epoch_; }
  const std::map<MemberId, PrivatePair>& pairs() const { return pairs_; }

  const Scalar& log_key() const;
  const Scalar& log_r() const;
  /// Falls back to log R on chains without S.
  const Scalar& log_s_or_r() const;

  Element key() const;
  Element R() const;
  std::optional<Element> S() const;

  /// Exponent of Y_i * S^x * R^r relative to K when the slot was built for
  /// (slot_pair) and the recovery uses (probe): zero iff the probe recovers K.
  Scalar recovery_offset(const PrivatePair& slot_pair, const PrivatePair& probe) const;

 private:
  void require_started() const;

  const Group* group_;
  std::uint64_t epoch_ = 0;
  std::optional<Scalar> log_key_;
  std::optional<Scalar> log_r_;
  std::optional<Scalar> log_s_;
  std::map<MemberId, PrivatePair> pairs_;
};

}  // namespace gke

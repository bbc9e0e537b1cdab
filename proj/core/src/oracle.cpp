#include "gke/oracle.hpp"

#include "gke/error.hpp"

namespace gke {

void ExponentOracle::require_started() const {
  if (!log_key_) throw Error(ErrorCode::kScenario, "oracle used before initial key agreement");
}

void ExponentOracle::ika(Variant variant, MemberId controller,
                         const std::map<MemberId, PrivatePair>& pairs, const PrivatePair& fresh) {
  const Group& g = *group_;
  const PrivatePair& own = pairs.at(controller);
  Scalar others = g.scalar(0);
  for (const auto& [id, pair] : pairs) {
    if (id != controller) others = g.scalar_add(others, pair.r);
  }
  // K_1 = g^{r_c * sum_{j != c} r_j}
  log_key_ = g.scalar_mul(own.r, others);
  log_r_ = own.r;
  if (variant == Variant::kP1) {
    log_s_ = own.x;
  } else {
    log_s_.reset();
  }
  pairs_ = pairs;
  pairs_.insert_or_assign(controller, fresh);
  epoch_ = 1;
}

void ExponentOracle::rekey(MemberId controller, const PrivatePair& fresh,
                           const std::set<MemberId>& leavers) {
  require_started();
  const Group& g = *group_;
  log_key_ = g.scalar_mul(*log_key_, fresh.r);
  log_r_ = g.scalar_mul(*log_r_, fresh.r);
  if (log_s_) log_s_ = g.scalar_mul(*log_s_, fresh.r);
  for (MemberId id : leavers) pairs_.erase(id);
  pairs_.insert_or_assign(controller, fresh);
  ++epoch_;
}

void ExponentOracle::join(MemberId collector, const PrivatePair& fresh,
                          const std::map<MemberId, PrivatePair>& joiners) {
  require_started();
  const Group& g = *group_;
  Scalar sum = g.scalar(0);
  for (const auto& [id, pair] : joiners) sum = g.scalar_add(sum, pair.r);
  // K_{t+1} = (K_t * R_t^{sum r_new})^{r'}
  log_key_ = g.scalar_mul(g.scalar_add(*log_key_, g.scalar_mul(*log_r_, sum)), fresh.r);
  log_r_ = g.scalar_mul(*log_r_, fresh.r);
  if (log_s_) log_s_ = g.scalar_mul(*log_s_, fresh.r);
  for (const auto& [id, pair] : joiners) pairs_.insert_or_assign(id, pair);
  pairs_.insert_or_assign(collector, fresh);
  ++epoch_;
}

const Scalar& ExponentOracle::log_key() const {
  require_started();
  return *log_key_;
}

const Scalar& ExponentOracle::log_r() const {
  require_started();
  return *log_r_;
}

const Scalar& ExponentOracle::log_s_or_r() const {
  require_started();
  return log_s_ ? *log_s_ : *log_r_;
}

Element ExponentOracle::key() const { return group_->exp_g(log_key()); }

Element ExponentOracle::R() const { return group_->exp_g(log_r()); }

std::optional<Element> ExponentOracle::S() const {
  require_started();
  if (!log_s_) return std::nullopt;
  return group_->exp_g(*log_s_);
}

Scalar ExponentOracle::recovery_offset(const PrivatePair& slot_pair,
                                       const PrivatePair& probe) const {
  const Group& g = *group_;
  // s * (x_probe - x_slot) + rho * (r_probe - r_slot)
  return g.scalar_add(g.scalar_mul(log_s_or_r(), g.scalar_sub(probe.x, slot_pair.x)),
                      g.scalar_mul(log_r(), g.scalar_sub(probe.r, slot_pair.r)));
}

}  // namespace gke

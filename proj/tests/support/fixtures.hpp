#pragma once

// Fixture F1 (tiny group): U1 (r=2, x=3) controls the IKA with fresh pair
// (9, 10); U2 = (5, 7); U3 = (8, 6). Epoch 2: U2 rekeys with (4, 1).
// Epoch 3: U3 collects U4 = (3, 2) with fresh pair (5, 7).

#include <map>
#include <vector>

#include "gke/group.hpp"
#include "gke/protocol.hpp"

namespace gke::testing {

inline const Group& tiny() {
  static const Group g = load_group("tiny");
  return g;
}

inline const Group& medium() {
  static const Group g = load_group("medium");
  return g;
}

inline const Group& modp2048() {
  static const Group g = load_group("modp2048");
  return g;
}

inline MemberId U(std::uint32_t i) { return MemberId{i}; }

inline MemberState member(const Group& group, std::uint32_t id, long r, long x) {
  return make_member(U(id), make_key_pair(group, group.scalar(r), group.scalar(x)));
}

inline KeyPair pair(const Group& group, long r, long x) {
  return make_key_pair(group, group.scalar(r), group.scalar(x));
}

inline Element el(const Group& group, long v) { return group.element(mpz_class(v)); }

struct F1 {
  const Group& group = tiny();
  std::map<MemberId, MemberState> m{{U(1), member(group, 1, 2, 3)},
                                    {U(2), member(group, 2, 5, 7)},
                                    {U(3), member(group, 3, 8, 6)}};

  PublishedKeys published(Variant variant = Variant::kP1) const {
    PublishedKeys out;
    for (const auto& [id, s] : m) {
      if (id != U(1)) out.emplace(id, publish_keys(s, variant));
    }
    return out;
  }

  MemberElements partials() const {
    MemberElements out;
    const auto pub = published();
    for (const auto& [id, s] : m) {
      if (id != U(1)) out.emplace(id, partial_product(group, s, pub, U(1)));
    }
    return out;
  }

  KeyingOutput epoch1() { return ika1_build_keying(group, m.at(U(1)), published(), partials(), pair(group, 9, 10)); }
};

}  // namespace gke::testing

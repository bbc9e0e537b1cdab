#pragma once

// Test-only oracle for small groups. Works on plain 64-bit integers and on
// discrete logs, never through gke::Group, so expected values computed here
// are independent of the implementation under test.

#include <cstdint>
#include <stdexcept>

namespace gke::testing {

struct SmallGroup {
  std::uint64_t p;
  std::uint64_t q;
  std::uint64_t g;

  static SmallGroup tiny() { return {23, 11, 4}; }
  static SmallGroup medium() { return {2039, 1019, 4}; }

  /// base^e for a subgroup element; the exponent is reduced mod q.
  std::uint64_t powmod(std::uint64_t base, std::int64_t e) const { return raw_powmod(base, mod_q(e)); }

  /// base^exp mod p with no exponent reduction (valid for any residue).
  std::uint64_t raw_powmod(std::uint64_t base, std::uint64_t exp) const {
    std::uint64_t result = 1;
    base %= p;
    while (exp > 0) {
      if (exp & 1) result = result * base % p;
      base = base * base % p;
      exp >>= 1;
    }
    return result;
  }

  /// g^e for an exponent expression evaluated over the integers.
  std::uint64_t gpow(std::int64_t e) const { return powmod(g, e); }

  std::uint64_t mod_q(std::int64_t e) const {
    const auto m = static_cast<std::int64_t>(q);
    return static_cast<std::uint64_t>(((e % m) + m) % m);
  }

  /// Brute-force discrete log base g.
  std::uint64_t dlog(std::uint64_t h) const {
    std::uint64_t acc = 1;
    for (std::uint64_t e = 0; e < q; ++e) {
      if (acc == h) return e;
      acc = acc * g % p;
    }
    throw std::invalid_argument("element outside the subgroup");
  }

  bool in_subgroup(std::uint64_t v) const { return v >= 1 && v < p && raw_powmod(v, q) == 1; }
};

}  // namespace gke::testing

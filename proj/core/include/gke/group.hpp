#pragma once

// Prime-order cyclic groups realised as the quadratic-residue subgroup of
// Z_p^* for a safe prime p = 2q + 1, plus arithmetic in the exponent field
// Z_q.
//
// NOTE: nothing here is constant time. GMP's mpz_powm leaks timing, sampling
// uses a non-cryptographic (but reproducible) engine, and secrets are never
// wiped. The code exists to exercise protocol logic, not to protect keys.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace gke {

using Bytes = std::vector<std::uint8_t>;

/// Deterministic random source. mt19937_64 is fully specified by the
/// standard, so a seed reproduces the same scalars on every platform.
using Rng = std::mt19937_64;

struct GroupParams {
  mpz_class p;
  mpz_class q;
  mpz_class g;
};

class Group;

/// Exponent in [0, q-1].
class Scalar {
 public:
  const mpz_class& value() const noexcept { return value_; }
  bool is_zero() const noexcept { return value_ == 0; }
  std::string to_decimal() const { return value_.get_str(10); }

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.value_ == b.value_; }

 private:
  friend class Group;
  explicit Scalar(mpz_class v) : value_(std::move(v)) {}
  mpz_class value_;
};

/// Member of the order-q subgroup, stored as a residue in [1, p-1].
class Element {
 public:
  const mpz_class& value() const noexcept { return value_; }

  friend bool operator==(const Element& a, const Element& b) { return a.value_ == b.value_; }

 private:
  friend class Group;
  explicit Element(mpz_class v) : value_(std::move(v)) {}
  mpz_class value_;
};

class Group {
 public:
  /// Validates all parameter invariants; throws kParameterValidation.
  explicit Group(GroupParams params);

  const GroupParams& params() const noexcept { return params_; }
  const mpz_class& p() const noexcept { return params_.p; }
  const mpz_class& q() const noexcept { return params_.q; }

  Element generator() const { return Element(params_.g); }
  Element identity() const { return Element(mpz_class(1)); }

  bool is_member(const mpz_class& residue) const;
  /// Throws kMembership when the residue is outside the subgroup.
  Element element(const mpz_class& residue) const;

  Element exp(const Element& base, const Scalar& e) const;
  Element exp_g(const Scalar& e) const { return exp(generator(), e); }
  Element mul(const Element& a, const Element& b) const;
  Element invert(const Element& a) const;

  /// Explicit scalar constructor: reduces mod q and, unlike sample_scalar,
  /// admits zero (degenerate single-key / Diffie-Hellman modes).
  Scalar scalar(const mpz_class& value) const;
  Scalar scalar(long value) const { return scalar(mpz_class(value)); }
  Scalar scalar_add(const Scalar& a, const Scalar& b) const;
  Scalar scalar_sub(const Scalar& a, const Scalar& b) const;
  Scalar scalar_neg(const Scalar& a) const;
  Scalar scalar_mul(const Scalar& a, const Scalar& b) const;
  /// Throws kNonInvertible for zero.
  Scalar scalar_invert(const Scalar& a) const;

  /// Uniform in [1, q-1].
  Scalar sample_scalar(Rng& rng) const;

  /// 4-byte big-endian length prefix, then the minimal big-endian magnitude.
  Bytes encode(const Element& a) const;
  /// Rejects non-canonical encodings (kDecode) and non-members (kMembership).
  Element decode(std::span<const std::uint8_t> bytes) const;

  std::string to_hex(const Element& a) const;
  Element from_hex(std::string_view hex) const;

  friend bool operator==(const Group& a, const Group& b) {
    return a.params_.p == b.params_.p && a.params_.q == b.params_.q &&
           a.params_.g == b.params_.g;
  }

 private:
  GroupParams params_;
  // p = 2q + 1: the subgroup is exactly the quadratic residues, so
  // membership reduces to a Legendre symbol instead of an exponentiation.
  bool residue_subgroup_ = false;
};

/// Preset names accepted by load_group.
inline constexpr std::string_view kPresetNames[] = {"tiny", "medium", "modp2048"};

/// tiny (p=23), medium (p=2039) or modp2048 (RFC 3526 group 14, g=2).
/// Throws kParameterValidation for an unknown name.
Group load_group(std::string_view preset);
Group load_group(const mpz_class& p, const mpz_class& q, const mpz_class& g);

/// Parses a decimal or 0x-prefixed hexadecimal integer.
mpz_class parse_integer(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

}  // namespace gke

#include "gke/group.hpp"

#include <string>

#include "gke/error.hpp"

namespace gke {
namespace {

constexpr int kPrimalityRounds = 64;

// RFC 3526, 2048-bit MODP group (group 14).
constexpr char kModp2048Prime[] =
    "0xFFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

bool is_probable_prime(const mpz_class& n) {
  return n > 1 && mpz_probab_prime_p(n.get_mpz_t(), kPrimalityRounds) != 0;
}

mpz_class mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParameterValidation: return "parameter-validation";
    case ErrorCode::kNonInvertible: return "non-invertible";
    case ErrorCode::kMembership: return "membership";
    case ErrorCode::kDecode: return "decode";
    case ErrorCode::kIncompleteRoster: return "incomplete-roster";
    case ErrorCode::kInconsistentPartial: return "inconsistent-partial";
    case ErrorCode::kNoSlot: return "no-slot";
    case ErrorCode::kNotAMember: return "not-a-member";
    case ErrorCode::kInvalidEviction: return "invalid-eviction";
    case ErrorCode::kEmptyRoster: return "empty-roster";
    case ErrorCode::kRosterConflict: return "roster-conflict";
    case ErrorCode::kDegenerateJoin: return "degenerate-join";
    case ErrorCode::kVariantMismatch: return "variant-mismatch";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kAttackInapplicable: return "attack-inapplicable";
    case ErrorCode::kRouting: return "routing";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kScenario: return "scenario";
    case ErrorCode::kInvariant: return "invariant";
  }
  return "unknown";
}

Group::Group(GroupParams params) : params_(std::move(params)) {
  const auto& [p, q, g] = params_;
  if (!is_probable_prime(p)) {
    throw Error(ErrorCode::kParameterValidation, "modulus p is not prime: " + p.get_str());
  }
  if (!is_probable_prime(q)) {
    throw Error(ErrorCode::kParameterValidation, "subgroup order q is not prime: " + q.get_str());
  }
  if (mod(p - 1, q) != 0) {
    throw Error(ErrorCode::kParameterValidation, "q does not divide p - 1");
  }
  if (g <= 1 || g >= p) {
    throw Error(ErrorCode::kParameterValidation, "generator must lie in [2, p-1]");
  }
  residue_subgroup_ = p == 2 * q + 1;
  if (!is_member(g)) {
    throw Error(ErrorCode::kParameterValidation, "generator does not have order q");
  }
}

bool Group::is_member(const mpz_class& residue) const {
  if (residue < 1 || residue >= params_.p) return false;
  if (residue_subgroup_) return mpz_jacobi(residue.get_mpz_t(), params_.p.get_mpz_t()) == 1;
  mpz_class r;
  mpz_powm(r.get_mpz_t(), residue.get_mpz_t(), params_.q.get_mpz_t(), params_.p.get_mpz_t());
  return r == 1;
}

Element Group::element(const mpz_class& residue) const {
  if (!is_member(residue)) {
    throw Error(ErrorCode::kMembership,
                "residue " + residue.get_str() + " is not in the order-q subgroup");
  }
  return Element(residue);
}

Element Group::exp(const Element& base, const Scalar& e) const {
  mpz_class r;
  mpz_powm(r.get_mpz_t(), base.value_.get_mpz_t(), e.value_.get_mpz_t(), params_.p.get_mpz_t());
  return Element(std::move(r));
}

Element Group::mul(const Element& a, const Element& b) const {
  return Element(mod(a.value_ * b.value_, params_.p));
}

Element Group::invert(const Element& a) const {
  mpz_class r;
  mpz_invert(r.get_mpz_t(), a.value_.get_mpz_t(), params_.p.get_mpz_t());
  return Element(std::move(r));
}

Scalar Group::scalar(const mpz_class& value) const { return Scalar(mod(value, params_.q)); }

Scalar Group::scalar_add(const Scalar& a, const Scalar& b) const {
  return Scalar(mod(a.value_ + b.value_, params_.q));
}

Scalar Group::scalar_sub(const Scalar& a, const Scalar& b) const {
  return Scalar(mod(a.value_ - b.value_, params_.q));
}

Scalar Group::scalar_neg(const Scalar& a) const { return Scalar(mod(-a.value_, params_.q)); }

Scalar Group::scalar_mul(const Scalar& a, const Scalar& b) const {
  return Scalar(mod(a.value_ * b.value_, params_.q));
}

Scalar Group::scalar_invert(const Scalar& a) const {
  mpz_class r;
  if (a.is_zero() ||
      mpz_invert(r.get_mpz_t(), a.value_.get_mpz_t(), params_.q.get_mpz_t()) == 0) {
    throw Error(ErrorCode::kNonInvertible, "scalar " + a.to_decimal() + " has no inverse mod q");
  }
  return Scalar(std::move(r));
}

Scalar Group::sample_scalar(Rng& rng) const {
  // Rejection sampling on [0, q-2], shifted by one.
  const mpz_class bound = params_.q - 1;
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  const std::size_t words = (bits + 63) / 64;
  std::vector<std::uint64_t> buffer(words);
  for (;;) {
    for (auto& w : buffer) w = rng();
    if (const std::size_t extra = words * 64 - bits; extra != 0) {
      buffer.back() >>= extra;
    }
    mpz_class candidate;
    // Most significant word last.
    mpz_import(candidate.get_mpz_t(), words, -1, sizeof(std::uint64_t), 0, 0, buffer.data());
    if (candidate < bound) return Scalar(candidate + 1);
  }
}

Bytes Group::encode(const Element& a) const {
  const std::size_t len = (mpz_sizeinbase(a.value_.get_mpz_t(), 2) + 7) / 8;
  Bytes out(4 + len);
  out[0] = static_cast<std::uint8_t>((len >> 24) & 0xFF);
  out[1] = static_cast<std::uint8_t>((len >> 16) & 0xFF);
  out[2] = static_cast<std::uint8_t>((len >> 8) & 0xFF);
  out[3] = static_cast<std::uint8_t>(len & 0xFF);
  std::size_t written = 0;
  mpz_export(out.data() + 4, &written, 1, 1, 1, 0, a.value_.get_mpz_t());
  return out;
}

Element Group::decode(std::span<const std::uint8_t> bytes) const {
  if (bytes.size() < 5) {
    throw Error(ErrorCode::kDecode, "element encoding shorter than 5 bytes");
  }
  const std::size_t len = (std::size_t{bytes[0]} << 24) | (std::size_t{bytes[1]} << 16) |
                          (std::size_t{bytes[2]} << 8) | std::size_t{bytes[3]};
  if (len != bytes.size() - 4) {
    throw Error(ErrorCode::kDecode, "element length prefix does not match payload");
  }
  if (bytes[4] == 0) {
    throw Error(ErrorCode::kDecode, "element magnitude has a leading zero byte");
  }
  mpz_class value;
  mpz_import(value.get_mpz_t(), len, 1, 1, 1, 0, bytes.data() + 4);
  return element(value);
}

std::string Group::to_hex(const Element& a) const { return gke::to_hex(encode(a)); }

Element Group::from_hex(std::string_view hex) const { return decode(gke::from_hex(hex)); }

Group load_group(std::string_view preset) {
  if (preset == "tiny") return Group({mpz_class(23), mpz_class(11), mpz_class(4)});
  if (preset == "medium") return Group({mpz_class(2039), mpz_class(1019), mpz_class(4)});
  if (preset == "modp2048") {
    mpz_class p = parse_integer(kModp2048Prime);
    mpz_class q = (p - 1) / 2;
    return Group({std::move(p), std::move(q), mpz_class(2)});
  }
  throw Error(ErrorCode::kParameterValidation, "unknown group preset '" + std::string(preset) + "'");
}

Group load_group(const mpz_class& p, const mpz_class& q, const mpz_class& g) {
  return Group({p, q, g});
}

mpz_class parse_integer(std::string_view text) {
  std::string s(text);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s.erase(0, 2);
    base = 16;
  }
  mpz_class out;
  if (s.empty() || out.set_str(s, base) != 0 || out < 0) {
    throw Error(ErrorCode::kParse, "not a non-negative integer: '" + std::string(text) + "'");
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0F]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) {
    throw Error(ErrorCode::kDecode, "odd-length hex string");
  }
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    const int hi = hex_nibble(hex[i]);
    const int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error(ErrorCode::kDecode, "invalid hex digit");
    }
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace gke

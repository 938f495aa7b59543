#pragma once

// Type-3 pairing group abstraction over BLS12-381 (blst).
//
// Group operations are written additively: `P + Q` is the group law and
// `P * s` is scalar multiplication, so the textbook h^m becomes `h * m`.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <blst.h>

namespace tcred {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Source of uniformly random bytes.
class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// getrandom(2)-backed CSPRNG; safe to share across threads.
class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

Rng& system_rng();

/// Overwrites memory in a way the optimizer may not elide.
void secure_wipe(void* data, std::size_t size);

Digest sha256(ByteView data);

class Scalar {
 public:
  static constexpr std::size_t kEncodedSize = 32;

  Scalar();  // zero
  static Scalar from_u64(std::uint64_t v);
  /// Uniform in [1, p).
  static Scalar random(Rng& rng = system_rng());
  /// Reduces an arbitrary-length big-endian integer modulo p.
  static Scalar reduce(ByteView be_bytes);
  /// Accepts only canonical big-endian encodings (< p).
  static std::optional<Scalar> from_bytes(ByteView be_bytes);

  std::array<std::uint8_t, kEncodedSize> to_bytes() const;
  /// Little-endian canonical integer form, as blst's point multiplication wants it.
  blst_scalar to_blst_scalar() const;

  bool is_zero() const;
  Scalar inverse() const;  // requires non-zero

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  bool operator==(const Scalar& o) const;

  void wipe() { secure_wipe(&v_, sizeof(v_)); }

 private:
  blst_fr v_;
};

class G1 {
 public:
  static constexpr std::size_t kEncodedSize = 48;

  G1();  // identity
  static G1 generator();
  static G1 identity() { return G1(); }
  /// Decompresses and enforces curve and subgroup membership.
  static std::optional<G1> from_bytes(ByteView compressed);

  std::array<std::uint8_t, kEncodedSize> to_bytes() const;
  bool is_identity() const;
  bool in_subgroup() const;
  blst_p1_affine to_affine() const;

  G1 operator+(const G1& o) const;
  G1 operator-(const G1& o) const;
  G1 operator-() const;
  G1 operator*(const Scalar& s) const;
  G1& operator+=(const G1& o) { return *this = *this + o; }
  bool operator==(const G1& o) const;

  const blst_p1& raw() const { return p_; }
  static G1 from_raw(const blst_p1& p) {
    G1 g;
    g.p_ = p;
    return g;
  }

 private:
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr std::size_t kEncodedSize = 96;

  G2();  // identity
  static G2 generator();
  static G2 identity() { return G2(); }
  static std::optional<G2> from_bytes(ByteView compressed);

  std::array<std::uint8_t, kEncodedSize> to_bytes() const;
  bool is_identity() const;
  bool in_subgroup() const;
  blst_p2_affine to_affine() const;

  G2 operator+(const G2& o) const;
  G2 operator-(const G2& o) const;
  G2 operator-() const;
  G2 operator*(const Scalar& s) const;
  G2& operator+=(const G2& o) { return *this = *this + o; }
  bool operator==(const G2& o) const;

 private:
  blst_p2 p_;
};

/// Element of the target group, written multiplicatively.
class GT {
 public:
  GT();  // one
  static GT one() { return GT(); }
  bool is_one() const;
  GT operator*(const GT& o) const;
  GT pow(const Scalar& e) const;
  bool operator==(const GT& o) const;

 private:
  friend GT pairing(const G1&, const G2&);
  blst_fp12 v_;
};

GT pairing(const G1& a, const G2& b);

/// e(a, b) == e(c, d), computed with one shared final exponentiation.
bool pairing_equal(const G1& a, const G2& b, const G1& c, const G2& d);

/// Full-domain hash of a G1 element into G1: SSWU map (RFC 9380) over the
/// compressed encoding of `point`.
G1 hash_to_g1(const G1& point);

/// Hash of arbitrary bytes into G1 under an explicit domain tag.
G1 hash_bytes_to_g1(ByteView msg, std::string_view domain_tag);

/// Uniform-looking scalar: expand_message_xmd(SHA-256) to 48 bytes, reduced mod p.
Scalar hash_to_scalar(std::string_view domain_tag, ByteView transcript);

/// Length-prefixed byte accumulator for hash inputs.
class Transcript {
 public:
  Transcript& append(const G1& p);
  Transcript& append(const G2& p);
  Transcript& append(const Scalar& s);
  Transcript& append_u64(std::uint64_t v);
  Transcript& append_bytes(ByteView data);
  Transcript& append_label(std::string_view label) { return append_bytes(as_bytes(label)); }

  const Bytes& bytes() const { return buf_; }

 private:
  Bytes buf_;
};

struct Params {
  unsigned security_level = 0;
  G1 g1;
  G2 g2;
  std::vector<G1> hs;  // h_1..h_q

  std::size_t q() const { return hs.size(); }
  Digest digest() const;
};

/// Deterministic parameters for `q` attributes. The extra generators are
/// hash_bytes_to_g1("h_j" || j || seed), so every party derives the same set.
Params setup(unsigned security_level, std::size_t q);

std::string to_hex(ByteView data);
/// Accepts upper or lower case; nullopt on odd length or a non-hex digit.
std::optional<Bytes> from_hex(std::string_view text);

}  // namespace tcred

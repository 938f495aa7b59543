#include "tcred/backend.hpp"

#include <sys/random.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <system_error>

namespace tcred {

namespace {

constexpr std::string_view kHashG1Tag = "TCRED-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_HASHPOINT_";
constexpr std::string_view kGeneratorTag = "TCRED-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_GENERATOR_";
constexpr std::string_view kGeneratorSeed = "tcred-setup-seed-v1";

blst_scalar to_blst(const blst_fr& fr) {
  blst_scalar s;
  blst_scalar_from_fr(&s, &fr);
  return s;
}

}  // namespace

void SystemRng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    ssize_t n = getrandom(out.data() + done, out.size() - done, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::system_error(errno, std::generic_category(), "getrandom");
    }
    done += static_cast<std::size_t>(n);
  }
}

Rng& system_rng() {
  static SystemRng rng;
  return rng;
}

void secure_wipe(void* data, std::size_t size) {
  volatile auto* p = static_cast<volatile std::uint8_t*>(data);
  for (std::size_t i = 0; i < size; ++i) p[i] = 0;
}

Digest sha256(ByteView data) {
  Digest out;
  blst_sha256(out.data(), data.data(), data.size());
  return out;
}

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (auto b : data) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

std::optional<Bytes> from_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(text[2 * i]), lo = nibble(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

// ---------------------------------------------------------------- Scalar

Scalar::Scalar() { std::memset(&v_, 0, sizeof(v_)); }

Scalar Scalar::from_u64(std::uint64_t v) {
  std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar s;
  blst_fr_from_uint64(&s.v_, limbs);
  return s;
}

Scalar Scalar::random(Rng& rng) {
  for (;;) {
    std::array<std::uint8_t, 64> buf;
    rng.fill(buf);
    Scalar s = reduce(buf);
    secure_wipe(buf.data(), buf.size());
    if (!s.is_zero()) return s;
  }
}

Scalar Scalar::reduce(ByteView be_bytes) {
  blst_scalar tmp;
  blst_scalar_from_be_bytes(&tmp, be_bytes.data(), be_bytes.size());
  Scalar s;
  blst_fr_from_scalar(&s.v_, &tmp);
  return s;
}

std::optional<Scalar> Scalar::from_bytes(ByteView be_bytes) {
  if (be_bytes.size() != kEncodedSize) return std::nullopt;
  blst_scalar tmp;
  blst_scalar_from_bendian(&tmp, be_bytes.data());
  if (!blst_scalar_fr_check(&tmp)) return std::nullopt;
  Scalar s;
  blst_fr_from_scalar(&s.v_, &tmp);
  return s;
}

std::array<std::uint8_t, Scalar::kEncodedSize> Scalar::to_bytes() const {
  std::array<std::uint8_t, kEncodedSize> out;
  blst_scalar tmp = to_blst(v_);
  blst_bendian_from_scalar(out.data(), &tmp);
  return out;
}

blst_scalar Scalar::to_blst_scalar() const { return to_blst(v_); }

bool Scalar::is_zero() const { return *this == Scalar(); }

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero scalar");
  Scalar r;
  blst_fr_inverse(&r.v_, &v_);
  return r;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar r;
  blst_fr_add(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar r;
  blst_fr_sub(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar r;
  blst_fr_mul(&r.v_, &v_, &o.v_);
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r;
  blst_fr_cneg(&r.v_, &v_, true);
  return r;
}

bool Scalar::operator==(const Scalar& o) const { return std::memcmp(&v_, &o.v_, sizeof(v_)) == 0; }

// ---------------------------------------------------------------- G1

G1::G1() { std::memset(&p_, 0, sizeof(p_)); }

G1 G1::generator() { return from_raw(*blst_p1_generator()); }

std::optional<G1> G1::from_bytes(ByteView compressed) {
  if (compressed.size() != kEncodedSize) return std::nullopt;
  blst_p1_affine aff;
  if (blst_p1_uncompress(&aff, compressed.data()) != BLST_SUCCESS) return std::nullopt;
  if (!blst_p1_affine_in_g1(&aff)) return std::nullopt;
  G1 g;
  blst_p1_from_affine(&g.p_, &aff);
  return g;
}

std::array<std::uint8_t, G1::kEncodedSize> G1::to_bytes() const {
  std::array<std::uint8_t, kEncodedSize> out;
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }
bool G1::in_subgroup() const { return blst_p1_in_g1(&p_); }

blst_p1_affine G1::to_affine() const {
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p_);
  return a;
}

G1 G1::operator+(const G1& o) const {
  G1 r;
  blst_p1_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G1 G1::operator-() const {
  G1 r = *this;
  blst_p1_cneg(&r.p_, true);
  return r;
}

G1 G1::operator-(const G1& o) const { return *this + (-o); }

G1 G1::operator*(const Scalar& s) const {
  blst_scalar k = s.to_blst_scalar();
  G1 r;
  blst_p1_mult(&r.p_, &p_, k.b, 255);
  return r;
}

bool G1::operator==(const G1& o) const { return blst_p1_is_equal(&p_, &o.p_); }

// ---------------------------------------------------------------- G2

G2::G2() { std::memset(&p_, 0, sizeof(p_)); }

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

std::optional<G2> G2::from_bytes(ByteView compressed) {
  if (compressed.size() != kEncodedSize) return std::nullopt;
  blst_p2_affine aff;
  if (blst_p2_uncompress(&aff, compressed.data()) != BLST_SUCCESS) return std::nullopt;
  if (!blst_p2_affine_in_g2(&aff)) return std::nullopt;
  G2 g;
  blst_p2_from_affine(&g.p_, &aff);
  return g;
}

std::array<std::uint8_t, G2::kEncodedSize> G2::to_bytes() const {
  std::array<std::uint8_t, kEncodedSize> out;
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }
bool G2::in_subgroup() const { return blst_p2_in_g2(&p_); }

blst_p2_affine G2::to_affine() const {
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p_);
  return a;
}

G2 G2::operator+(const G2& o) const {
  G2 r;
  blst_p2_add_or_double(&r.p_, &p_, &o.p_);
  return r;
}

G2 G2::operator-() const {
  G2 r = *this;
  blst_p2_cneg(&r.p_, true);
  return r;
}

G2 G2::operator-(const G2& o) const { return *this + (-o); }

G2 G2::operator*(const Scalar& s) const {
  blst_scalar k = s.to_blst_scalar();
  G2 r;
  blst_p2_mult(&r.p_, &p_, k.b, 255);
  return r;
}

bool G2::operator==(const G2& o) const { return blst_p2_is_equal(&p_, &o.p_); }

// ---------------------------------------------------------------- GT

GT::GT() { v_ = *blst_fp12_one(); }

bool GT::is_one() const { return blst_fp12_is_one(&v_); }

GT GT::operator*(const GT& o) const {
  GT r;
  blst_fp12_mul(&r.v_, &v_, &o.v_);
  return r;
}

GT GT::pow(const Scalar& e) const {
  // Left-to-right square-and-multiply over the canonical exponent bits.
  const auto be = e.to_bytes();
  GT acc;
  for (std::uint8_t byte : be) {
    for (int bit = 7; bit >= 0; --bit) {
      blst_fp12_sqr(&acc.v_, &acc.v_);
      if ((byte >> bit) & 1) blst_fp12_mul(&acc.v_, &acc.v_, &v_);
    }
  }
  return acc;
}

bool GT::operator==(const GT& o) const { return blst_fp12_is_equal(&v_, &o.v_); }

GT pairing(const G1& a, const G2& b) {
  GT r;
  if (a.is_identity() || b.is_identity()) return r;
  const blst_p1_affine pa = a.to_affine();
  const blst_p2_affine pb = b.to_affine();
  blst_fp12 ml;
  blst_miller_loop(&ml, &pb, &pa);
  blst_final_exp(&r.v_, &ml);
  return r;
}

bool pairing_equal(const G1& a, const G2& b, const G1& c, const G2& d) {
  // e(a, b) * e(-c, d) == 1
  std::vector<blst_p1_affine> ps;
  std::vector<blst_p2_affine> qs;
  if (!a.is_identity() && !b.is_identity()) {
    ps.push_back(a.to_affine());
    qs.push_back(b.to_affine());
  }
  if (!c.is_identity() && !d.is_identity()) {
    ps.push_back((-c).to_affine());
    qs.push_back(d.to_affine());
  }
  if (ps.empty()) return true;
  const blst_p1_affine* pp[2] = {&ps[0], ps.size() > 1 ? &ps[1] : nullptr};
  const blst_p2_affine* qp[2] = {&qs[0], qs.size() > 1 ? &qs[1] : nullptr};
  blst_fp12 ml, fe;
  blst_miller_loop_n(&ml, qp, pp, ps.size());
  blst_final_exp(&fe, &ml);
  return blst_fp12_is_one(&fe);
}

// ---------------------------------------------------------------- hashing

G1 hash_bytes_to_g1(ByteView msg, std::string_view domain_tag) {
  blst_p1 out;
  blst_hash_to_g1(&out, msg.data(), msg.size(),
                  reinterpret_cast<const byte*>(domain_tag.data()), domain_tag.size(), nullptr, 0);
  return G1::from_raw(out);
}

G1 hash_to_g1(const G1& point) {
  const auto enc = point.to_bytes();
  return hash_bytes_to_g1(enc, kHashG1Tag);
}

Scalar hash_to_scalar(std::string_view domain_tag, ByteView transcript) {
  std::array<std::uint8_t, 48> wide;
  blst_expand_message_xmd(wide.data(), wide.size(), transcript.data(), transcript.size(),
                          reinterpret_cast<const byte*>(domain_tag.data()), domain_tag.size());
  return Scalar::reduce(wide);
}

Transcript& Transcript::append(const G1& p) {
  const auto e = p.to_bytes();
  buf_.insert(buf_.end(), e.begin(), e.end());
  return *this;
}

Transcript& Transcript::append(const G2& p) {
  const auto e = p.to_bytes();
  buf_.insert(buf_.end(), e.begin(), e.end());
  return *this;
}

Transcript& Transcript::append(const Scalar& s) {
  const auto e = s.to_bytes();
  buf_.insert(buf_.end(), e.begin(), e.end());
  return *this;
}

Transcript& Transcript::append_u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Transcript& Transcript::append_bytes(ByteView data) {
  append_u64(data.size());
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

// ---------------------------------------------------------------- setup

Digest Params::digest() const {
  Transcript t;
  t.append_label("tcred-params-v1").append_u64(security_level).append(g1).append(g2).append_u64(hs.size());
  for (const auto& h : hs) t.append(h);
  return sha256(t.bytes());
}

Params setup(unsigned security_level, std::size_t q) {
  if (security_level != 128) {
    throw std::invalid_argument("unsupported security level " + std::to_string(security_level) +
                                " (BLS12-381 instantiation supports 128)");
  }
  if (q == 0) throw std::invalid_argument("attribute capacity q must be positive");
  if (q > 0xffff) throw std::invalid_argument("attribute capacity q too large");

  Params params;
  params.security_level = security_level;
  params.g1 = G1::generator();
  params.g2 = G2::generator();
  params.hs.reserve(q);
  for (std::size_t j = 1; j <= q; ++j) {
    Transcript t;
    t.append_label("h_j").append_u64(j).append_label(kGeneratorSeed);
    params.hs.push_back(hash_bytes_to_g1(t.bytes(), kGeneratorTag));
  }
  return params;
}

}  // namespace tcred

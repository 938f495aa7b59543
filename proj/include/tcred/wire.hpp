#pragma once

// Canonical binary encodings. Every object travels inside an envelope
//
//   version (1 byte) | kind (1 byte) | payload
//
// with compressed points, 32-byte big-endian scalars and explicit counts.
// The normative layout table lives in docs/wire-format.md.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tcred/attributes.hpp"
#include "tcred/keys.hpp"
#include "tcred/nizk.hpp"
#include "tcred/scheme.hpp"

namespace tcred::wire {

inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kEnvelopeOverhead = 2;

enum class Kind : std::uint8_t {
  params = 0x01,
  params_digest = 0x02,
  sk_share = 0x03,
  vk_share = 0x04,
  agg_vk = 0x05,
  request = 0x06,
  partial = 0x07,  // blinded partial (h, c~) from an authority
  partial_credential = 0x08,
  credential = 0x09,
  show = 0x0a,
  petition_packet = 0x0b,
  attributes = 0x0c,
  bound = 0x10,  // params digest || inner envelope
};

std::string_view to_string(Kind kind);

enum class Errc {
  wrong_length,
  bad_point,
  bad_scalar,
  unknown_version,
  unknown_kind,
  kind_mismatch,
  bad_structure,
};

std::string_view to_string(Errc code);

class WireError : public std::runtime_error {
 public:
  WireError(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

struct Envelope {
  Kind kind;
  ByteView payload;  // view into the buffer passed to open()
};

Bytes seal(Kind kind, ByteView payload);
/// Rejects unknown versions and kinds before touching the payload.
Envelope open(ByteView bytes);
/// open() plus a kind check.
ByteView open_as(ByteView bytes, Kind expected);

class Writer {
 public:
  Writer& u8(std::uint8_t v);
  Writer& u16(std::size_t v);
  Writer& u32(std::uint32_t v);
  Writer& scalar(const Scalar& s);
  Writer& g1(const G1& p);
  Writer& g2(const G2& p);
  Writer& raw(ByteView data);
  Writer& blob(ByteView data);  // u32 length prefix

  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class Reader {
 public:
  explicit Reader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  Scalar scalar();
  G1 g1();
  G2 g2();
  ByteView raw(std::size_t n);
  ByteView blob();
  ByteView rest();
  /// Throws wrong_length unless everything was consumed.
  void finish() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

/// Strong type so the params digest has its own envelope kind.
struct ParamsDigest {
  Digest value{};
  bool operator==(const ParamsDigest&) const = default;
};

Bytes encode(const Params& v);
Bytes encode(const ParamsDigest& v);
Bytes encode(const SecretKeyShare& v);
Bytes encode(const VerificationKeyShare& v);
Bytes encode(const AggregatedVerificationKey& v);
Bytes encode(const BlindSignRequest& v);
Bytes encode(const BlindedPartial& v);
Bytes encode(const PartialCredential& v);
Bytes encode(const Credential& v);
Bytes encode(const ShowMaterial& v);
Bytes encode(const AttributeVector& v);

template <class T>
T decode(ByteView bytes);

template <> Params decode<Params>(ByteView bytes);
template <> ParamsDigest decode<ParamsDigest>(ByteView bytes);
template <> SecretKeyShare decode<SecretKeyShare>(ByteView bytes);
template <> VerificationKeyShare decode<VerificationKeyShare>(ByteView bytes);
template <> AggregatedVerificationKey decode<AggregatedVerificationKey>(ByteView bytes);
template <> BlindSignRequest decode<BlindSignRequest>(ByteView bytes);
template <> BlindedPartial decode<BlindedPartial>(ByteView bytes);
template <> PartialCredential decode<PartialCredential>(ByteView bytes);
template <> Credential decode<Credential>(ByteView bytes);
template <> ShowMaterial decode<ShowMaterial>(ByteView bytes);
template <> AttributeVector decode<AttributeVector>(ByteView bytes);

// Payload-level helpers shared with other modules.
void write_public_attrs(Writer& w, const std::vector<PublicAttribute>& attrs);
std::vector<PublicAttribute> read_public_attrs(Reader& r);
void write_predicate(Writer& w, const Predicate& p);
Predicate read_predicate(Reader& r);
void write_show(Writer& w, const ShowMaterial& v);
ShowMaterial read_show(Reader& r);

/// Wraps an envelope together with the params digest it belongs to.
Bytes bind(const Digest& params_digest, ByteView envelope);
struct Bound {
  Digest params_digest;
  ByteView envelope;
};
Bound unbind(ByteView bytes);

std::string to_base64(ByteView data);
/// Throws WireError(bad_structure) on invalid input.
Bytes from_base64(std::string_view text);

Bytes read_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename.
void write_file(const std::filesystem::path& path, ByteView data);

}  // namespace tcred::wire

#include "tcred/wire.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iterator>

namespace tcred::wire {

std::string_view to_string(Kind kind) {
  switch (kind) {
    case Kind::params: return "params";
    case Kind::params_digest: return "params-digest";
    case Kind::sk_share: return "sk-share";
    case Kind::vk_share: return "vk-share";
    case Kind::agg_vk: return "agg-vk";
    case Kind::request: return "request";
    case Kind::partial: return "partial";
    case Kind::partial_credential: return "partial-credential";
    case Kind::credential: return "credential";
    case Kind::show: return "show";
    case Kind::petition_packet: return "petition-packet";
    case Kind::attributes: return "attributes";
    case Kind::bound: return "bound";
  }
  return "unknown";
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::wrong_length: return "wrong-length";
    case Errc::bad_point: return "bad-point";
    case Errc::bad_scalar: return "bad-scalar";
    case Errc::unknown_version: return "unknown-version";
    case Errc::unknown_kind: return "unknown-kind";
    case Errc::kind_mismatch: return "kind-mismatch";
    case Errc::bad_structure: return "bad-structure";
  }
  return "unknown";
}

namespace {

bool known_kind(std::uint8_t k) { return (k >= 0x01 && k <= 0x0c) || k == 0x10; }

}  // namespace

// ------------------------------------------------------------- envelope

Bytes seal(Kind kind, ByteView payload) {
  Bytes out;
  out.reserve(payload.size() + kEnvelopeOverhead);
  out.push_back(kVersion);
  out.push_back(static_cast<std::uint8_t>(kind));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Envelope open(ByteView bytes) {
  if (bytes.size() < kEnvelopeOverhead) throw WireError(Errc::wrong_length, "envelope shorter than header");
  if (bytes[0] != kVersion) throw WireError(Errc::unknown_version, "version " + std::to_string(bytes[0]));
  if (!known_kind(bytes[1])) throw WireError(Errc::unknown_kind, "kind " + std::to_string(bytes[1]));
  return Envelope{static_cast<Kind>(bytes[1]), bytes.subspan(kEnvelopeOverhead)};
}

ByteView open_as(ByteView bytes, Kind expected) {
  Envelope env = open(bytes);
  if (env.kind != expected)
    throw WireError(Errc::kind_mismatch,
                    "expected " + std::string(to_string(expected)) + ", got " + std::string(to_string(env.kind)));
  return env.payload;
}

// ------------------------------------------------------------- writer

Writer& Writer::u8(std::uint8_t v) {
  buf_.push_back(v);
  return *this;
}

Writer& Writer::u16(std::size_t v) {
  if (v > 0xffff) throw std::length_error("count does not fit in u16");
  buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  buf_.push_back(static_cast<std::uint8_t>(v));
  return *this;
}

Writer& Writer::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> shift));
  return *this;
}

Writer& Writer::scalar(const Scalar& s) { return raw(s.to_bytes()); }
Writer& Writer::g1(const G1& p) { return raw(p.to_bytes()); }
Writer& Writer::g2(const G2& p) { return raw(p.to_bytes()); }

Writer& Writer::raw(ByteView data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
  return *this;
}

Writer& Writer::blob(ByteView data) {
  if (data.size() > 0xffffffffu) throw std::length_error("blob too large");
  u32(static_cast<std::uint32_t>(data.size()));
  return raw(data);
}

// ------------------------------------------------------------- reader

ByteView Reader::raw(std::size_t n) {
  if (data_.size() - pos_ < n) throw WireError(Errc::wrong_length, "truncated input");
  ByteView out = data_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t Reader::u8() { return raw(1)[0]; }

std::uint16_t Reader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t Reader::u32() {
  auto b = raw(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

Scalar Reader::scalar() {
  auto s = Scalar::from_bytes(raw(Scalar::kEncodedSize));
  if (!s) throw WireError(Errc::bad_scalar, "scalar not reduced modulo group order");
  return *s;
}

G1 Reader::g1() {
  auto p = G1::from_bytes(raw(G1::kEncodedSize));
  if (!p) throw WireError(Errc::bad_point, "invalid G1 encoding or not in subgroup");
  return *p;
}

G2 Reader::g2() {
  auto p = G2::from_bytes(raw(G2::kEncodedSize));
  if (!p) throw WireError(Errc::bad_point, "invalid G2 encoding or not in subgroup");
  return *p;
}

ByteView Reader::blob() { return raw(u32()); }

ByteView Reader::rest() { return raw(data_.size() - pos_); }

void Reader::finish() const {
  if (pos_ != data_.size()) throw WireError(Errc::wrong_length, "trailing bytes");
}

// ------------------------------------------------------------- shared pieces

void write_public_attrs(Writer& w, const std::vector<PublicAttribute>& attrs) {
  w.u16(attrs.size());
  for (const auto& a : attrs) w.u16(a.position).scalar(a.value);
}

std::vector<PublicAttribute> read_public_attrs(Reader& r) {
  std::vector<PublicAttribute> out(r.u16());
  std::size_t last = 0;
  for (auto& a : out) {
    a.position = r.u16();
    if (a.position <= last) throw WireError(Errc::bad_structure, "public positions must be strictly increasing");
    last = a.position;
    a.value = r.scalar();
  }
  return out;
}

void write_predicate(Writer& w, const Predicate& p) {
  w.u16(p.revealed.size());
  for (auto pos : p.revealed) w.u16(pos);
}

Predicate read_predicate(Reader& r) {
  Predicate p;
  p.revealed.resize(r.u16());
  std::size_t last = 0;
  for (auto& pos : p.revealed) {
    pos = r.u16();
    if (pos <= last) throw WireError(Errc::bad_structure, "predicate positions must be strictly increasing");
    last = pos;
  }
  return p;
}

namespace {

template <class Proof>
void write_proof(Writer& w, const Proof& p) {
  w.scalar(p.challenge).u16(p.responses.size());
  for (const auto& s : p.responses) w.scalar(s);
}

template <class Proof>
Proof read_proof(Reader& r) {
  Proof p;
  p.challenge = r.scalar();
  p.responses.resize(r.u16());
  for (auto& s : p.responses) s = r.scalar();
  return p;
}

template <class F>
auto decode_payload(ByteView bytes, Kind kind, F&& body) {
  Reader r(open_as(bytes, kind));
  auto out = body(r);
  r.finish();
  return out;
}

}  // namespace

void write_show(Writer& w, const ShowMaterial& v) {
  w.g2(v.kappa).g1(v.nu).g1(v.sigma.h).g1(v.sigma.s);
  write_public_attrs(w, v.public_attrs);
  write_predicate(w, v.predicate);
  write_proof(w, v.proof);
}

ShowMaterial read_show(Reader& r) {
  ShowMaterial v;
  v.kappa = r.g2();
  v.nu = r.g1();
  v.sigma.h = r.g1();
  v.sigma.s = r.g1();
  v.public_attrs = read_public_attrs(r);
  v.predicate = read_predicate(r);
  v.proof = read_proof<ShowProof>(r);
  return v;
}

// ------------------------------------------------------------- objects

Bytes encode(const Params& v) {
  Writer w;
  w.u16(v.security_level).u16(v.q()).g1(v.g1).g2(v.g2);
  for (const auto& h : v.hs) w.g1(h);
  return seal(Kind::params, w.take());
}

template <>
Params decode<Params>(ByteView bytes) {
  return decode_payload(bytes, Kind::params, [](Reader& r) {
    Params p;
    p.security_level = r.u16();
    const std::size_t q = r.u16();
    p.g1 = r.g1();
    p.g2 = r.g2();
    for (std::size_t j = 0; j < q; ++j) p.hs.push_back(r.g1());
    // Parameters are deterministic; anything else is not ours.
    Params expected;
    try {
      expected = setup(p.security_level, q);
    } catch (const std::invalid_argument& e) {
      throw WireError(Errc::bad_structure, e.what());
    }
    if (!(p.g1 == expected.g1) || !(p.g2 == expected.g2) || !std::equal(p.hs.begin(), p.hs.end(), expected.hs.begin()))
      throw WireError(Errc::bad_structure, "params do not match deterministic setup");
    return p;
  });
}

Bytes encode(const ParamsDigest& v) { return seal(Kind::params_digest, v.value); }

template <>
ParamsDigest decode<ParamsDigest>(ByteView bytes) {
  return decode_payload(bytes, Kind::params_digest, [](Reader& r) {
    ParamsDigest d;
    auto raw = r.raw(d.value.size());
    std::copy(raw.begin(), raw.end(), d.value.begin());
    return d;
  });
}

Bytes encode(const SecretKeyShare& v) {
  Writer w;
  w.u32(v.index).scalar(v.x).u16(v.y.size());
  for (const auto& y : v.y) w.scalar(y);
  return seal(Kind::sk_share, w.take());
}

template <>
SecretKeyShare decode<SecretKeyShare>(ByteView bytes) {
  return decode_payload(bytes, Kind::sk_share, [](Reader& r) {
    SecretKeyShare sk;
    sk.index = r.u32();
    if (sk.index == 0) throw WireError(Errc::bad_structure, "authority index 0");
    sk.x = r.scalar();
    sk.y.resize(r.u16());
    for (auto& y : sk.y) y = r.scalar();
    return sk;
  });
}

Bytes encode(const VerificationKeyShare& v) {
  Writer w;
  w.u32(v.index).g2(v.alpha).u16(v.beta.size());
  for (const auto& b : v.beta) w.g2(b);
  return seal(Kind::vk_share, w.take());
}

template <>
VerificationKeyShare decode<VerificationKeyShare>(ByteView bytes) {
  return decode_payload(bytes, Kind::vk_share, [](Reader& r) {
    VerificationKeyShare vk;
    vk.index = r.u32();
    if (vk.index == 0) throw WireError(Errc::bad_structure, "authority index 0");
    vk.alpha = r.g2();
    vk.beta.resize(r.u16());
    for (auto& b : vk.beta) b = r.g2();
    return vk;
  });
}

Bytes encode(const AggregatedVerificationKey& v) {
  Writer w;
  w.g2(v.alpha).u16(v.beta.size());
  for (const auto& b : v.beta) w.g2(b);
  w.u16(v.indices.size());
  for (auto i : v.indices) w.u32(i);
  return seal(Kind::agg_vk, w.take());
}

template <>
AggregatedVerificationKey decode<AggregatedVerificationKey>(ByteView bytes) {
  return decode_payload(bytes, Kind::agg_vk, [](Reader& r) {
    AggregatedVerificationKey vk;
    vk.alpha = r.g2();
    vk.beta.resize(r.u16());
    for (auto& b : vk.beta) b = r.g2();
    vk.indices.resize(r.u16());
    for (auto& i : vk.indices) i = r.u32();
    return vk;
  });
}

Bytes encode(const BlindSignRequest& v) {
  Writer w;
  w.g1(v.gamma).g1(v.commitment).u16(v.ciphertexts.size());
  for (const auto& c : v.ciphertexts) w.g1(c.a).g1(c.b);
  write_public_attrs(w, v.public_attrs);
  write_predicate(w, v.predicate);
  write_proof(w, v.proof);
  return seal(Kind::request, w.take());
}

template <>
BlindSignRequest decode<BlindSignRequest>(ByteView bytes) {
  return decode_payload(bytes, Kind::request, [](Reader& r) {
    BlindSignRequest v;
    v.gamma = r.g1();
    v.commitment = r.g1();
    v.ciphertexts.resize(r.u16());
    for (auto& c : v.ciphertexts) {
      c.a = r.g1();
      c.b = r.g1();
    }
    v.public_attrs = read_public_attrs(r);
    v.predicate = read_predicate(r);
    v.proof = read_proof<IssuanceProof>(r);
    return v;
  });
}

Bytes encode(const BlindedPartial& v) {
  Writer w;
  w.u32(v.index).g1(v.h).g1(v.c.a).g1(v.c.b);
  return seal(Kind::partial, w.take());
}

template <>
BlindedPartial decode<BlindedPartial>(ByteView bytes) {
  return decode_payload(bytes, Kind::partial, [](Reader& r) {
    BlindedPartial v;
    v.index = r.u32();
    v.h = r.g1();
    v.c.a = r.g1();
    v.c.b = r.g1();
    return v;
  });
}

Bytes encode(const PartialCredential& v) {
  Writer w;
  w.u32(v.index).g1(v.credential.h).g1(v.credential.s);
  return seal(Kind::partial_credential, w.take());
}

template <>
PartialCredential decode<PartialCredential>(ByteView bytes) {
  return decode_payload(bytes, Kind::partial_credential, [](Reader& r) {
    PartialCredential v;
    v.index = r.u32();
    v.credential.h = r.g1();
    v.credential.s = r.g1();
    return v;
  });
}

Bytes encode(const Credential& v) {
  Writer w;
  w.g1(v.h).g1(v.s);
  return seal(Kind::credential, w.take());
}

template <>
Credential decode<Credential>(ByteView bytes) {
  return decode_payload(bytes, Kind::credential, [](Reader& r) {
    Credential v;
    v.h = r.g1();
    v.s = r.g1();
    return v;
  });
}

Bytes encode(const ShowMaterial& v) {
  Writer w;
  write_show(w, v);
  return seal(Kind::show, w.take());
}

template <>
ShowMaterial decode<ShowMaterial>(ByteView bytes) {
  return decode_payload(bytes, Kind::show, [](Reader& r) { return read_show(r); });
}

Bytes encode(const AttributeVector& v) {
  Writer w;
  w.u16(v.size());
  for (std::size_t pos = 1; pos <= v.size(); ++pos) w.u8(v.is_public(pos) ? 1 : 0).scalar(v.at(pos));
  return seal(Kind::attributes, w.take());
}

template <>
AttributeVector decode<AttributeVector>(ByteView bytes) {
  return decode_payload(bytes, Kind::attributes, [](Reader& r) {
    const std::size_t q = r.u16();
    std::vector<Scalar> values;
    std::vector<std::size_t> pub;
    for (std::size_t pos = 1; pos <= q; ++pos) {
      const auto flag = r.u8();
      if (flag > 1) throw WireError(Errc::bad_structure, "attribute flag");
      if (flag == 1) pub.push_back(pos);
      values.push_back(r.scalar());
    }
    return AttributeVector(std::move(values), pub);
  });
}

Bytes bind(const Digest& params_digest, ByteView envelope) {
  Writer w;
  w.raw(params_digest).raw(envelope);
  return seal(Kind::bound, w.take());
}

Bound unbind(ByteView bytes) {
  Reader r(open_as(bytes, Kind::bound));
  Bound b;
  auto d = r.raw(b.params_digest.size());
  std::copy(d.begin(), d.end(), b.params_digest.begin());
  b.envelope = r.rest();
  open(b.envelope);
  return b;
}

// ------------------------------------------------------------- base64

std::string to_base64(ByteView data) {
  std::string out(4 * ((data.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                                static_cast<int>(data.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

Bytes from_base64(std::string_view text) {
  if (text.size() % 4 != 0) throw WireError(Errc::bad_structure, "base64 length not a multiple of 4");
  Bytes out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw WireError(Errc::bad_structure, "invalid base64");
  std::size_t pad = 0;
  if (!text.empty() && text.back() == '=') ++pad;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

// ------------------------------------------------------------- files

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, ByteView data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tcred::wire

#include <doctest.h>

#include <functional>

#include "fixtures.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using fixtures::random_attrs;

namespace {

struct Corpus {
  Params params = setup(128, 3);
  KeyGenOutput keys;
  AggregatedVerificationKey vk;
  PreparedRequest prepared;
  BlindedPartial blinded;
  PartialCredential partial;
  Credential credential;
  ShowMaterial show;
  AttributeVector attrs;

  explicit Corpus(Rng& rng) : attrs(random_attrs(3, 2, rng)) {
    keys = ttp_keygen(params, 2, 3, rng);
    vk = aggregate_keys(keys.verification_shares);
    prepared = prepare_blind_sign(params, attrs, Predicate::reveal({3}), rng);
    blinded = blind_sign(params, keys.secret_shares[1], prepared.request);
    partial = unblind(blinded, prepared.d);
    std::vector<PartialCredential> ps;
    for (const auto& sk : keys.secret_shares) ps.push_back(unblind(blind_sign(params, sk, prepared.request), prepared.d));
    credential = aggregate_credentials(ps);
    show = prove_cred(params, vk, credential, attrs.with_public(std::vector<std::size_t>{3}), Predicate::reveal({3}), rng);
  }

  // Encoded sample of every kind, paired with a decode-and-re-encode function.
  std::vector<std::pair<Bytes, std::function<Bytes(ByteView)>>> samples() const {
    auto rt = [](auto tag) {
      using T = decltype(tag);
      return std::function<Bytes(ByteView)>([](ByteView b) { return wire::encode(wire::decode<T>(b)); });
    };
    return {
        {wire::encode(params), rt(Params{})},
        {wire::encode(wire::ParamsDigest{params.digest()}), rt(wire::ParamsDigest{})},
        {wire::encode(keys.secret_shares[0]), rt(SecretKeyShare{})},
        {wire::encode(keys.verification_shares[0]), rt(VerificationKeyShare{})},
        {wire::encode(vk), rt(AggregatedVerificationKey{})},
        {wire::encode(prepared.request), rt(BlindSignRequest{})},
        {wire::encode(blinded), rt(BlindedPartial{})},
        {wire::encode(partial), rt(PartialCredential{})},
        {wire::encode(credential), rt(Credential{})},
        {wire::encode(show), rt(ShowMaterial{})},
        {wire::encode(attrs), rt(AttributeVector{})},
    };
  }
};

template <class F>
wire::Errc code_of(F&& f) {
  try {
    f();
  } catch (const wire::WireError& e) {
    return e.code();
  }
  FAIL("no WireError thrown");
  return wire::Errc::bad_structure;
}

}  // namespace

TEST_CASE("every kind round-trips and re-encodes byte-identically") {
  testing::SeededRng rng(50);
  const Corpus c(rng);
  for (const auto& [bytes, roundtrip] : c.samples()) CHECK(roundtrip(bytes) == bytes);

  CHECK(wire::decode<Credential>(wire::encode(c.credential)) == c.credential);
  CHECK(wire::decode<BlindedPartial>(wire::encode(c.blinded)) == c.blinded);
  const auto show = wire::decode<ShowMaterial>(wire::encode(c.show));
  CHECK(verify_cred(c.params, c.vk, show));
  const auto req = wire::decode<BlindSignRequest>(wire::encode(c.prepared.request));
  CHECK_NOTHROW(blind_sign(c.params, c.keys.secret_shares[0], req));
  const auto vk = wire::decode<AggregatedVerificationKey>(wire::encode(c.vk));
  CHECK(vk.digest() == c.vk.digest());
}

TEST_CASE("credential encoding has constant size") {
  testing::SeededRng rng(51);
  for (std::size_t q : {1u, 4u, 16u}) {
    const Params params = setup(128, q);
    const auto issued = fixtures::issue(params, random_attrs(q, q, rng), 2, 3, rng);
    CHECK(wire::encode(issued.credential).size() == 2 * 48 + wire::kEnvelopeOverhead);
  }
}

TEST_CASE("every strict prefix is rejected as wrong-length") {
  testing::SeededRng rng(52);
  const Corpus c(rng);
  for (const auto& [bytes, roundtrip] : c.samples()) {
    for (std::size_t n = 0; n < bytes.size(); ++n) {
      const ByteView prefix(bytes.data(), n);
      REQUIRE_MESSAGE(code_of([&] { roundtrip(prefix); }) == wire::Errc::wrong_length,
                      "kind " << int(bytes[1]) << " prefix " << n);
    }
    Bytes longer = bytes;
    longer.push_back(0);
    CHECK(code_of([&] { roundtrip(longer); }) == wire::Errc::wrong_length);
  }
}

TEST_CASE("distinct error codes") {
  testing::SeededRng rng(53);
  const Corpus c(rng);
  Bytes cred = wire::encode(c.credential);

  auto v = cred;
  v[0] = 2;
  CHECK(code_of([&] { wire::decode<Credential>(v); }) == wire::Errc::unknown_version);
  v = cred;
  v[1] = 0x7f;
  CHECK(code_of([&] { wire::decode<Credential>(v); }) == wire::Errc::unknown_kind);
  v = cred;
  v[1] = static_cast<std::uint8_t>(wire::Kind::show);
  CHECK(code_of([&] { wire::decode<Credential>(v); }) == wire::Errc::kind_mismatch);
  v = cred;
  v[10] ^= 0xff;  // x coordinate; off the curve or off the subgroup
  CHECK(code_of([&] { wire::decode<Credential>(v); }) == wire::Errc::bad_point);

  Bytes sk = wire::encode(c.keys.secret_shares[0]);
  // index u32 then x: force x >= p.
  std::fill(sk.begin() + 6, sk.begin() + 38, 0xff);
  CHECK(code_of([&] { wire::decode<SecretKeyShare>(sk); }) == wire::Errc::bad_scalar);

  // Public positions out of order.
  wire::Writer w;
  std::vector<PublicAttribute> bad = {{2, Scalar::from_u64(1)}, {1, Scalar::from_u64(2)}};
  wire::write_public_attrs(w, bad);
  const Bytes payload = w.take();
  CHECK(code_of([&] {
          wire::Reader r(payload);
          wire::read_public_attrs(r);
        }) == wire::Errc::bad_structure);
}

TEST_CASE("params decode checks deterministic setup") {
  const Params p = setup(128, 2);
  CHECK(wire::decode<Params>(wire::encode(p)).digest() == p.digest());
  Bytes enc = wire::encode(p);
  enc.back() ^= 0x01;
  CHECK_THROWS_AS(wire::decode<Params>(enc), wire::WireError);
}

TEST_CASE("random mutations never crash and accepted inputs are canonical") {
  testing::SeededRng rng(54);
  const Corpus c(rng);
  std::size_t accepted = 0, rejected = 0;
  for (const auto& [bytes, roundtrip] : c.samples()) {
    for (int i = 0; i < 300; ++i) {
      Bytes m = bytes;
      std::uint8_t r[3];
      rng.fill(r);
      switch (r[0] % 4) {
        case 0: m[r[1] % m.size()] ^= static_cast<std::uint8_t>(1u << (r[2] % 8)); break;
        case 1: m.resize(r[1] % m.size()); break;
        case 2: m.insert(m.begin() + r[1] % m.size(), r[2]); break;
        default: {
          Bytes junk(r[1]);
          rng.fill(junk);
          m = junk;
        }
      }
      try {
        const Bytes re = roundtrip(m);
        REQUIRE(re == m);
        ++accepted;
      } catch (const wire::WireError&) {
        ++rejected;
      }
    }
  }
  CHECK(rejected > accepted);
}

TEST_CASE("bind and unbind") {
  testing::SeededRng rng(55);
  const Corpus c(rng);
  const Bytes inner = wire::encode(c.keys.secret_shares[0]);
  const Bytes bound = wire::bind(c.params.digest(), inner);
  const auto u = wire::unbind(bound);
  CHECK(u.params_digest == c.params.digest());
  CHECK(Bytes(u.envelope.begin(), u.envelope.end()) == inner);
  CHECK_THROWS_AS(wire::unbind(inner), wire::WireError);
}

TEST_CASE("base64") {
  const Bytes data = {0, 1, 2, 250, 251, 252, 253};
  CHECK(wire::from_base64(wire::to_base64(data)) == data);
  CHECK(wire::to_base64(Bytes{}) == "");
  CHECK(wire::from_base64("") == Bytes{});
  CHECK(wire::to_base64(as_bytes("foobar")) == "Zm9vYmFy");
  CHECK(wire::from_base64("Zm9vYg==") == Bytes(as_bytes("foob").begin(), as_bytes("foob").end()));
  CHECK_THROWS_AS(wire::from_base64("abc"), wire::WireError);
  CHECK_THROWS_AS(wire::from_base64("ab!="), wire::WireError);
}

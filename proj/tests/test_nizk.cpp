#include <doctest.h>

#include "fixtures.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using fixtures::honest_issuance;
using fixtures::honest_show;
using fixtures::random_attrs;

TEST_CASE("issuance proof completeness across private counts") {
  testing::SeededRng rng(20);
  for (std::size_t q_priv : {0u, 1u, 3u, 5u}) {
    const Params params = setup(128, 5);
    for (int trial = 0; trial < 100; ++trial) {
      const auto attrs = random_attrs(5, q_priv, rng);
      const auto iss = honest_issuance(params, attrs, rng);
      const auto proof = prove_issuance(params, iss.statement, iss.witness, rng);
      REQUIRE(proof.responses.size() == 2 * q_priv + 2);
      REQUIRE(verify_issuance(params, iss.statement, proof));
    }
  }
}

TEST_CASE("issuance proof rejects tampering") {
  const Params params = setup(128, 3);
  testing::SeededRng rng(21);
  const auto attrs = random_attrs(3, 2, rng);
  const auto iss = honest_issuance(params, attrs, rng);
  const auto proof = prove_issuance(params, iss.statement, iss.witness, rng);
  REQUIRE(verify_issuance(params, iss.statement, proof));

  SUBCASE("commitment changed") {
    auto s = iss.statement;
    s.commitment = s.commitment + params.g1;
    s.h = hash_to_g1(s.commitment);  // even with a consistent h
    CHECK_FALSE(verify_issuance(params, s, proof));
  }
  SUBCASE("h not derived from the commitment") {
    auto s = iss.statement;
    s.h = s.h + params.g1;
    CHECK_FALSE(verify_issuance(params, s, proof));
  }
  SUBCASE("challenge + 1") {
    auto p = proof;
    p.challenge += Scalar::from_u64(1);
    CHECK_FALSE(verify_issuance(params, iss.statement, p));
  }
  SUBCASE("swapped ciphertext components") {
    auto s = iss.statement;
    std::swap(s.ciphertexts[0].a, s.ciphertexts[0].b);
    CHECK_FALSE(verify_issuance(params, s, proof));
  }
  SUBCASE("each response perturbed") {
    for (std::size_t i = 0; i < proof.responses.size(); ++i) {
      auto p = proof;
      p.responses[i] += Scalar::from_u64(1);
      CHECK_FALSE(verify_issuance(params, iss.statement, p));
    }
  }
  SUBCASE("public attribute value changed") {
    auto s = iss.statement;
    s.public_attrs[0].value += Scalar::from_u64(1);
    CHECK_FALSE(verify_issuance(params, s, proof));
  }
  SUBCASE("predicate descriptor changed") {
    auto s = iss.statement;
    s.predicate = Predicate::reveal({3});
    CHECK_FALSE(verify_issuance(params, s, proof));
  }
  SUBCASE("proof from different parameters") {
    const Params other = setup(128, 4);
    CHECK_THROWS_AS(verify_issuance(other, iss.statement, proof), std::invalid_argument);
  }
  SUBCASE("length mismatches throw") {
    auto p = proof;
    p.responses.pop_back();
    CHECK_THROWS_AS(verify_issuance(params, iss.statement, p), std::invalid_argument);
    auto s = iss.statement;
    s.ciphertexts.pop_back();
    CHECK_THROWS_AS(verify_issuance(params, s, proof), std::invalid_argument);
  }
}

TEST_CASE("issuance proof with no private attributes covers only d") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(22);
  const auto attrs = random_attrs(2, 0, rng);
  const auto iss = honest_issuance(params, attrs, rng);
  const auto proof = prove_issuance(params, iss.statement, iss.witness, rng);
  CHECK(proof.responses.size() == 2);
  CHECK(verify_issuance(params, iss.statement, proof));
}

TEST_CASE("issuance proof: every single-bit flip of the encoded request is rejected") {
  // q = 1 private attribute; the authority-side check is decode + verify.
  const Params params = setup(128, 1);
  testing::SeededRng rng(23);
  const auto prepared = prepare_blind_sign(params, random_attrs(1, 1, rng), Predicate::any(), rng);
  const Bytes enc = wire::encode(prepared.request);

  auto accepted = [&](const Bytes& bytes) {
    try {
      const auto req = wire::decode<BlindSignRequest>(bytes);
      return verify_issuance(params, req.statement(hash_to_g1(req.commitment)), req.proof);
    } catch (const std::exception&) {
      return false;
    }
  };
  REQUIRE(accepted(enc));
  std::size_t flips = 0;
  for (std::size_t byte = wire::kEnvelopeOverhead; byte < enc.size(); ++byte) {
    for (int bit = 0; bit < 8; ++bit) {
      Bytes m = enc;
      m[byte] ^= static_cast<std::uint8_t>(1u << bit);
      REQUIRE_MESSAGE(!accepted(m), "byte " << byte << " bit " << bit);
      ++flips;
    }
  }
  CHECK(flips == 8 * (enc.size() - wire::kEnvelopeOverhead));
}

TEST_CASE("show proof completeness and tampering") {
  testing::SeededRng rng(24);
  for (std::size_t q_priv : {0u, 1u, 3u, 5u}) {
    const Params params = setup(128, 5);
    const auto vk = fixtures::random_vk(params, rng);
    for (int trial = 0; trial < 100; ++trial) {
      const auto show = honest_show(params, vk, random_attrs(5, q_priv, rng), rng);
      const auto proof = prove_show(params, vk, show.statement, show.witness, rng);
      REQUIRE(proof.responses.size() == q_priv + 1);
      REQUIRE(verify_show(params, vk, show.statement, proof));
    }
  }

  const Params params = setup(128, 1);
  const auto vk = fixtures::random_vk(params, rng);
  const auto show = honest_show(params, vk, random_attrs(1, 1, rng), rng);
  const auto proof = prove_show(params, vk, show.statement, show.witness, rng);
  REQUIRE(verify_show(params, vk, show.statement, proof));

  SUBCASE("wrong r in the witness") {
    auto w = show.witness;
    w.r += Scalar::from_u64(1);
    CHECK_FALSE(verify_show(params, vk, show.statement, prove_show(params, vk, show.statement, w, rng)));
  }
  SUBCASE("transplanted onto a different kappa") {
    auto s = show.statement;
    s.kappa = s.kappa + params.g2;
    CHECK_FALSE(verify_show(params, vk, s, proof));
  }
  SUBCASE("a zeroed response") {
    for (std::size_t i = 0; i < proof.responses.size(); ++i) {
      auto p = proof;
      p.responses[i] = Scalar();
      CHECK_FALSE(verify_show(params, vk, show.statement, p));
    }
  }
  SUBCASE("different verification key") {
    const auto other = fixtures::random_vk(params, rng);
    CHECK_FALSE(verify_show(params, other, show.statement, proof));
  }
  SUBCASE("s' is bound") {
    auto s = show.statement;
    s.sigma.s = s.sigma.s + params.g1;
    CHECK_FALSE(verify_show(params, vk, s, proof));
  }
}

TEST_CASE("proofs do not transplant across relations") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(25);
  const auto vk = fixtures::random_vk(params, rng);
  const auto show = honest_show(params, vk, random_attrs(1, 1, rng), rng);
  const NullifierStatement nul{hash_bytes_to_g1(as_bytes("petition"), "TEST"), G1(), 1, {}};
  NullifierStatement honest = nul;
  honest.zeta = nul.tag * show.witness.private_attrs[0];

  const auto plain = prove_show(params, vk, show.statement, show.witness, rng);
  const auto pet = prove_petition_show(params, vk, show.statement, honest, show.witness, rng);
  CHECK(verify_show(params, vk, show.statement, plain));
  CHECK(verify_petition_show(params, vk, show.statement, honest, pet));
  CHECK_FALSE(verify_show(params, vk, show.statement, pet));
  CHECK_FALSE(verify_petition_show(params, vk, show.statement, honest, plain));
}

TEST_CASE("petition show proof") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(26);
  const auto vk = fixtures::random_vk(params, rng);
  const auto show = honest_show(params, vk, random_attrs(2, 2, rng), rng);
  const Scalar k = show.witness.private_attrs[0];
  const G1 gs = hash_bytes_to_g1(as_bytes("petition-a"), "TEST");
  const G1 gs2 = hash_bytes_to_g1(as_bytes("petition-b"), "TEST");

  const NullifierStatement a{gs, gs * k, 1, Bytes{'y', 'e', 's'}};
  const auto proof = prove_petition_show(params, vk, show.statement, a, show.witness, rng);
  CHECK(verify_petition_show(params, vk, show.statement, a, proof));

  SUBCASE("zeta from a different key") {
    NullifierStatement bad = a;
    bad.zeta = gs * (k + Scalar::from_u64(1));
    CHECK_FALSE(verify_petition_show(params, vk, show.statement, bad,
                                     prove_petition_show(params, vk, show.statement, bad, show.witness, rng)));
  }
  SUBCASE("same key, two petitions") {
    const NullifierStatement b{gs2, gs2 * k, 1, Bytes{'y', 'e', 's'}};
    const auto proof_b = prove_petition_show(params, vk, show.statement, b, show.witness, rng);
    CHECK(verify_petition_show(params, vk, show.statement, b, proof_b));
    CHECK_FALSE(a.zeta == b.zeta);
    CHECK_FALSE(verify_petition_show(params, vk, show.statement, b, proof));
  }
  SUBCASE("payload is bound") {
    NullifierStatement swapped = a;
    swapped.payload = Bytes{'n', 'o'};
    CHECK_FALSE(verify_petition_show(params, vk, show.statement, swapped, proof));
  }
  SUBCASE("key position must be private") {
    NullifierStatement bad = a;
    bad.key_position = 3;
    CHECK_THROWS_AS(verify_petition_show(params, vk, show.statement, bad, proof), std::invalid_argument);
  }
}

#include <doctest.h>

#include <set>
#include <string>

#include "tcred/commit.hpp"
#include "tcred/testing.hpp"

using namespace tcred;

TEST_CASE("commit") {
  const Params params = setup(128, 3);
  testing::SeededRng rng(10);

  const std::vector<Scalar> zeros(3);
  CHECK(commit(params, zeros, Scalar()).is_identity());

  std::vector<Scalar> m = {Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)};
  const Scalar o = Scalar::random(rng);
  CHECK(commit(params, m, o) == commit(params, m, o));
  CHECK_THROWS_AS(commit(params, std::vector<Scalar>(2), o), std::invalid_argument);

  const Params p1 = setup(128, 1);
  const Scalar m1 = Scalar::random(rng);
  CHECK(commit(p1, std::vector<Scalar>{m1}, o) == p1.g1 * o + p1.hs[0] * m1);
}

TEST_CASE("commit shows no collisions on random openings") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(11);
  std::set<std::string> seen;
  for (int i = 0; i < 200; ++i) {
    std::vector<Scalar> m = {Scalar::random(rng), Scalar::random(rng)};
    seen.insert(to_hex(commit(params, m, Scalar::random(rng)).to_bytes()));
  }
  CHECK(seen.size() == 200);
}

TEST_CASE("elgamal keygen") {
  const Params params = setup(128, 1);
  const auto a = elgamal_keygen(params);
  const auto b = elgamal_keygen(params);
  CHECK(a.gamma == params.g1 * a.d);
  CHECK_FALSE(a.d.is_zero());
  CHECK_FALSE(a.d == b.d);
}

TEST_CASE("elgamal encrypt and decrypt") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(12);
  const auto kp = elgamal_keygen(params, rng);
  const G1 h = hash_to_g1(params.hs[0]);

  for (int i = 0; i < 20; ++i) {
    const Scalar m = Scalar::random(rng);
    const auto enc = elgamal_encrypt(params, kp.gamma, h, m, rng);
    CHECK(elgamal_decrypt(kp.d, enc.ciphertext) == h * m);
    CHECK(enc.ciphertext.a == params.g1 * enc.k);
    CHECK(enc.ciphertext.b == kp.gamma * enc.k + h * m);
    CHECK_FALSE(enc.k.is_zero());
  }

  const auto zero = elgamal_encrypt(params, kp.gamma, h, Scalar(), rng);
  CHECK(elgamal_decrypt(kp.d, zero.ciphertext).is_identity());

  const G1 x = params.g1 * Scalar::random(rng);
  CHECK(elgamal_decrypt(kp.d, {G1::identity(), x}) == x);

  const Scalar m = Scalar::random(rng);
  const auto enc = elgamal_encrypt(params, kp.gamma, h, m, rng);
  CHECK_FALSE(elgamal_decrypt(kp.d + Scalar::from_u64(1), enc.ciphertext) == h * m);

  CHECK_THROWS_AS(elgamal_encrypt(params, kp.gamma, G1::identity(), m, rng), std::invalid_argument);
}

TEST_CASE("ElGamal homomorphism used by blind signing") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(13);
  const G1 h = hash_to_g1(params.g1 * Scalar::random(rng));
  for (int i = 0; i < 100; ++i) {
    const auto kp = elgamal_keygen(params, rng);
    const Scalar x = Scalar::random(rng), y = Scalar::random(rng), m = Scalar::random(rng);
    const auto enc = elgamal_encrypt(params, kp.gamma, h, m, rng);
    const ElGamalCiphertext transformed{enc.ciphertext.a * y, h * x + enc.ciphertext.b * y};
    REQUIRE(elgamal_decrypt(kp.d, transformed) == h * (x + y * m));
  }
}

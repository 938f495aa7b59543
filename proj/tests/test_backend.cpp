#include <doctest.h>

#include <set>
#include <string>

#include "tcred/backend.hpp"
#include "tcred/testing.hpp"

using namespace tcred;

TEST_CASE("setup derives q distinct generators") {
  const Params one = setup(128, 1);
  CHECK(one.hs.size() == 1);

  const Params p = setup(128, 5);
  REQUIRE(p.hs.size() == 5);
  std::set<std::string> encodings;
  encodings.insert(to_hex(p.g1.to_bytes()));
  for (const auto& h : p.hs) {
    CHECK_FALSE(h.is_identity());
    CHECK(h.in_subgroup());
    encodings.insert(to_hex(h.to_bytes()));
  }
  CHECK(encodings.size() == 6);
  CHECK_FALSE(p.g2.is_identity());

  // Every party derives identical parameters.
  const Params again = setup(128, 5);
  CHECK(again.digest() == p.digest());
  // Prefix-stable: h_1..h_5 do not depend on q.
  CHECK(setup(128, 7).hs[4] == p.hs[4]);
}

TEST_CASE("setup rejects bad inputs") {
  CHECK_THROWS_AS(setup(128, 0), std::invalid_argument);
  CHECK_THROWS_AS(setup(80, 1), std::invalid_argument);
  CHECK_THROWS_AS(setup(256, 1), std::invalid_argument);
}

TEST_CASE("scalar field arithmetic") {
  testing::SeededRng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Scalar a = Scalar::random(rng), b = Scalar::random(rng);
    CHECK(a + b - b == a);
    CHECK(a * a.inverse() == Scalar::from_u64(1));
    CHECK(a + (-a) == Scalar());
    CHECK(*Scalar::from_bytes(a.to_bytes()) == a);
  }
  CHECK(Scalar::from_u64(6) == Scalar::from_u64(2) * Scalar::from_u64(3));
  CHECK_THROWS(Scalar().inverse());

  // p - 1 encodes canonically; p itself does not.
  const auto minus_one = (-Scalar::from_u64(1)).to_bytes();
  CHECK(Scalar::from_bytes(minus_one).has_value());
  auto p_bytes = minus_one;
  p_bytes[31] += 1;
  CHECK_FALSE(Scalar::from_bytes(p_bytes).has_value());
  CHECK(Scalar::reduce(p_bytes).is_zero());
}

TEST_CASE("pairing is bilinear and non-degenerate") {
  const G1 g1 = G1::generator();
  const G2 g2 = G2::generator();
  const GT base = pairing(g1, g2);

  CHECK(pairing(g1 * Scalar::from_u64(2), g2 * Scalar::from_u64(3)) == base.pow(Scalar::from_u64(6)));
  CHECK_FALSE(base.is_one());
  CHECK(pairing(G1::identity(), g2).is_one());
  CHECK(pairing(g1, G2::identity()).is_one());

  testing::SeededRng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Scalar x = Scalar::random(rng), y = Scalar::random(rng);
    REQUIRE(pairing(g1 * x, g2 * y) == base.pow(x * y));
  }
}

TEST_CASE("pairing_equal matches direct comparison") {
  testing::SeededRng rng(3);
  const G1 g1 = G1::generator();
  const G2 g2 = G2::generator();
  const Scalar x = Scalar::random(rng), y = Scalar::random(rng);
  CHECK(pairing_equal(g1 * x, g2 * y, g1 * (x * y), g2));
  CHECK_FALSE(pairing_equal(g1 * x, g2 * y, g1 * (x * y + Scalar::from_u64(1)), g2));
  CHECK(pairing_equal(G1::identity(), g2, G1::identity(), g2));
  CHECK_FALSE(pairing_equal(G1::identity(), g2, g1, g2));
}

TEST_CASE("hash_to_g1 is deterministic, collision-free on samples and in the subgroup") {
  testing::SeededRng rng(4);
  const G1 g1 = G1::generator();
  const G1 p = g1 * Scalar::random(rng);
  CHECK(hash_to_g1(p) == hash_to_g1(p));

  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    const G1 h = hash_to_g1(g1 * Scalar::random(rng));
    CHECK(h.in_subgroup());
    CHECK_FALSE(h.is_identity());
    seen.insert(to_hex(h.to_bytes()));
  }
  CHECK(seen.size() == 1000);
}

TEST_CASE("hash_to_scalar separates domains") {
  const Bytes transcript = {1, 2, 3};
  CHECK(hash_to_scalar("pi_s", transcript) == hash_to_scalar("pi_s", transcript));
  CHECK_FALSE(hash_to_scalar("pi_s", transcript) == hash_to_scalar("pi_v", transcript));

  testing::SeededRng rng(5);
  for (int i = 0; i < 1000; ++i) {
    Bytes t(40);
    rng.fill(t);
    const Scalar s = hash_to_scalar("tag", t);
    // Canonical encoding implies < p.
    REQUIRE(Scalar::from_bytes(s.to_bytes()).has_value());
  }
}

TEST_CASE("point decoding enforces subgroup membership") {
  testing::SeededRng rng(6);
  const G1 p = G1::generator() * Scalar::random(rng);
  auto enc = p.to_bytes();
  CHECK(*G1::from_bytes(enc) == p);
  CHECK(G1::from_bytes(G1::identity().to_bytes())->is_identity());

  int rejected = 0;
  for (int i = 0; i < 200; ++i) {
    std::array<std::uint8_t, 48> junk;
    rng.fill(junk);
    junk[0] = static_cast<std::uint8_t>((junk[0] & 0x1f) | 0x80);  // compressed, not infinity
    auto decoded = G1::from_bytes(junk);
    if (!decoded) {
      ++rejected;
    } else {
      CHECK(decoded->in_subgroup());
    }
  }
  // A random x is on the curve about half the time; almost never in G1.
  CHECK(rejected >= 195);

  const G2 q = G2::generator() * Scalar::random(rng);
  CHECK(*G2::from_bytes(q.to_bytes()) == q);
  CHECK_FALSE(G2::from_bytes(std::array<std::uint8_t, 10>{}).has_value());
}

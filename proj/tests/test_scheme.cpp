#include <doctest.h>

#include <set>
#include <string>

#include "fixtures.hpp"
#include "tcred/wire.hpp"

using namespace tcred;
using fixtures::random_attrs;
using fixtures::random_values;

namespace {

// Naive evaluation sum_k c_k * x^k, independent of the library's Horner loop.
Scalar eval_naive(const std::vector<Scalar>& coeffs, std::uint64_t x) {
  Scalar acc, power = Scalar::from_u64(1);
  for (const auto& c : coeffs) {
    acc += c * power;
    power *= Scalar::from_u64(x);
  }
  return acc;
}

Scalar interpolate_at_zero(std::span<const AuthorityIndex> idx, std::span<const Scalar> ys) {
  const auto l = lagrange_coefficients(idx);
  Scalar acc;
  for (std::size_t i = 0; i < ys.size(); ++i) acc += l[i] * ys[i];
  return acc;
}

}  // namespace

TEST_CASE("lagrange coefficients") {
  const std::vector<AuthorityIndex> one = {1};
  CHECK(lagrange_coefficients(one) == std::vector<Scalar>{Scalar::from_u64(1)});

  const std::vector<AuthorityIndex> two = {1, 2};
  const auto l = lagrange_coefficients(two);
  CHECK(l[0] == Scalar::from_u64(2));
  CHECK(l[1] == -Scalar::from_u64(1));  // p - 1

  testing::SeededRng rng(30);
  const std::vector<std::vector<AuthorityIndex>> sets = {{3}, {2, 7}, {1, 2, 3}, {5, 1, 9, 4}, {10, 3, 6, 2, 8}};
  for (const auto& s : sets) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto coeffs = random_values(s.size(), rng);
      std::vector<Scalar> ys;
      for (auto i : s) ys.push_back(eval_naive(coeffs, i));
      REQUIRE(interpolate_at_zero(s, ys) == coeffs[0]);
    }
  }

  CHECK_THROWS_AS(lagrange_coefficients(std::vector<AuthorityIndex>{1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_coefficients(std::vector<AuthorityIndex>{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(lagrange_coefficients(std::vector<AuthorityIndex>{}), std::invalid_argument);
}

TEST_CASE("ttp_keygen") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(31);

  SUBCASE("t = 1, n = 1 hands out the master key") {
    const auto d = testing::ttp_keygen_with_dealer(params, 1, 1, rng);
    CHECK(d.keys.secret_shares[0].x == d.master.x);
    CHECK(d.keys.secret_shares[0].y == d.master.y);
  }
  SUBCASE("t = 2, n = 3 shares interpolate consistently") {
    const auto d = testing::ttp_keygen_with_dealer(params, 2, 3, rng);
    const auto& sk = d.keys.secret_shares;
    REQUIRE(sk.size() == 3);
    const std::vector<AuthorityIndex> a = {1, 2}, b = {2, 3};
    const std::vector<Scalar> xa = {sk[0].x, sk[1].x}, xb = {sk[1].x, sk[2].x};
    CHECK(interpolate_at_zero(a, xa) == interpolate_at_zero(b, xb));
    CHECK(interpolate_at_zero(a, xa) == d.master.x);
    for (std::size_t j = 0; j < 2; ++j) {
      const std::vector<Scalar> ya = {sk[0].y[j], sk[1].y[j]};
      CHECK(interpolate_at_zero(a, ya) == d.master.y[j]);
    }
    for (const auto& vk : d.keys.verification_shares) {
      CHECK(vk.alpha == params.g2 * sk[vk.index - 1].x);
      CHECK(vk.beta.size() == 2);
    }
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(ttp_keygen(params, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(ttp_keygen(params, 0, 2), std::invalid_argument);
  }
}

TEST_CASE("prepare_blind_sign") {
  const Params params = setup(128, 3);
  testing::SeededRng rng(32);
  const auto attrs = random_attrs(3, 2, rng);
  const auto a = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto b = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  CHECK(a.request.ciphertexts.size() == 2);
  CHECK(a.h == hash_to_g1(a.request.commitment));
  CHECK_FALSE(a.request.commitment == b.request.commitment);
  CHECK_FALSE(a.h == b.h);

  const auto keys = ttp_keygen(params, 2, 4, rng);
  for (const auto& sk : keys.secret_shares) CHECK_NOTHROW(blind_sign(params, sk, a.request));

  CHECK_THROWS_AS(prepare_blind_sign(params, random_attrs(2, 1, rng)), std::invalid_argument);
}

TEST_CASE("blind_sign and unblind match direct exponentiation") {
  const Params params = setup(128, 3);
  testing::SeededRng rng(33);
  const auto keys = ttp_keygen(params, 2, 3, rng);

  for (std::size_t q_priv : {0u, 1u, 2u, 3u}) {
    const auto attrs = random_attrs(3, q_priv, rng);
    const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
    for (const auto& sk : keys.secret_shares) {
      const auto partial = unblind(blind_sign(params, sk, prepared.request), prepared.d);
      Scalar e = sk.x;
      for (std::size_t j = 0; j < 3; ++j) e += sk.y[j] * attrs.values()[j];
      CHECK(partial.index == sk.index);
      CHECK(partial.credential.h == prepared.h);
      CHECK(partial.credential.s == prepared.h * e);
      CHECK(verify_partial(params, keys.verification_shares[sk.index - 1], partial.credential, attrs.values()));
    }
  }
}

TEST_CASE("blind_sign rejects tampered requests") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(34);
  const auto keys = ttp_keygen(params, 1, 1, rng);
  const auto& sk = keys.secret_shares[0];
  const auto prepared = prepare_blind_sign(params, random_attrs(2, 1, rng), Predicate::any(), rng);

  auto reason_of = [&](const BlindSignRequest& req, const Predicate& policy = Predicate::any()) {
    try {
      blind_sign(params, sk, req, policy);
    } catch (const ProtocolError& e) {
      return std::string(to_string(e.reason()));
    }
    return std::string("accepted");
  };

  CHECK(reason_of(prepared.request) == "accepted");
  auto bad = prepared.request;
  bad.proof.challenge += Scalar::from_u64(1);
  CHECK(reason_of(bad) == "proof-invalid");
  bad = prepared.request;
  bad.public_attrs[0].value += Scalar::from_u64(1);
  CHECK(reason_of(bad) == "proof-invalid");
  bad = prepared.request;
  bad.ciphertexts.clear();
  CHECK(reason_of(bad) == "malformed");
  // Policy demanding attribute 1 in the clear.
  CHECK(reason_of(prepared.request, Predicate::reveal({1})) == "proof-invalid");
  CHECK(reason_of(prepared.request, Predicate::reveal({2})) == "accepted");
}

TEST_CASE("all-public issuance") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(35);
  const auto keys = ttp_keygen(params, 1, 1, rng);
  const auto& sk = keys.secret_shares[0];
  const auto attrs = random_attrs(2, 0, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto blinded = blind_sign(params, sk, prepared.request);

  const Scalar e = sk.x + sk.y[0] * attrs.values()[0] + sk.y[1] * attrs.values()[1];
  CHECK(blinded.c.a.is_identity());
  CHECK(blinded.c.b == prepared.h * e);
  CHECK(unblind(blinded, Scalar()).credential.s == blinded.c.b);
  CHECK(unblind(blinded, Scalar::random(rng)).credential.s == blinded.c.b);
}

TEST_CASE("unblinding with the wrong key fails verification") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(36);
  const auto keys = ttp_keygen(params, 1, 1, rng);
  const auto attrs = random_attrs(1, 1, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  const auto blinded = blind_sign(params, keys.secret_shares[0], prepared.request);
  const auto vk = aggregate_keys(keys.verification_shares);
  CHECK(verify_signature(params, vk, unblind(blinded, prepared.d).credential, attrs.values()));
  CHECK_FALSE(verify_signature(params, vk, unblind(blinded, prepared.d + Scalar::from_u64(1)).credential,
                               attrs.values()));
}

TEST_CASE("aggregate_keys") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(37);
  const auto d = testing::ttp_keygen_with_dealer(params, 3, 5, rng);
  const auto& vks = d.keys.verification_shares;
  const auto master_vk = testing::master_verification_key(params, d.master);

  const std::vector<VerificationKeyShare> a = {vks[0], vks[1], vks[2]};
  const std::vector<VerificationKeyShare> b = {vks[4], vks[1], vks[3]};
  const auto ka = aggregate_keys(a), kb = aggregate_keys(b);
  CHECK(ka.alpha == master_vk.alpha);
  CHECK(ka.beta == master_vk.beta);
  CHECK(kb.alpha == ka.alpha);
  CHECK(kb.beta == ka.beta);
  CHECK(ka.digest() == kb.digest());

  const std::vector<VerificationKeyShare> single = {vks[0]};
  const auto ks = aggregate_keys(single);
  CHECK(ks.alpha == vks[0].alpha);
  CHECK(ks.beta == vks[0].beta);

  const std::vector<VerificationKeyShare> dup = {vks[0], vks[0]};
  CHECK_THROWS_AS(aggregate_keys(dup), std::invalid_argument);
}

TEST_CASE("aggregate_credentials equals the dealer's signature") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(38);
  const auto d = testing::ttp_keygen_with_dealer(params, 3, 5, rng);
  const auto attrs = random_attrs(2, 1, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  std::vector<PartialCredential> all;
  for (const auto& sk : d.keys.secret_shares) all.push_back(unblind(blind_sign(params, sk, prepared.request), prepared.d));

  const auto expected = testing::sign_with_master(d.master, prepared.h, attrs.values());
  const std::vector<PartialCredential> a = {all[0], all[1], all[2]};
  const std::vector<PartialCredential> b = {all[1], all[3], all[4]};
  const auto ca = aggregate_credentials(a), cb = aggregate_credentials(b);
  CHECK(ca == expected);
  CHECK(wire::encode(ca) == wire::encode(cb));

  const std::vector<PartialCredential> one = {all[2]};
  CHECK(aggregate_credentials(one).s == all[2].credential.s * lagrange_coefficients(std::vector<AuthorityIndex>{3})[0]);

  auto mismatched = a;
  mismatched[1].credential.h = mismatched[1].credential.h + params.g1;
  CHECK_THROWS_AS(aggregate_credentials(mismatched), std::invalid_argument);
  const std::vector<PartialCredential> dup = {all[0], all[0]};
  CHECK_THROWS_AS(aggregate_credentials(dup), std::invalid_argument);
}

TEST_CASE("aggregate with t = 1 returns the single partial") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(39);
  const auto keys = ttp_keygen(params, 1, 3, rng);
  const auto prepared = prepare_blind_sign(params, random_attrs(1, 1, rng), Predicate::any(), rng);
  const auto p = unblind(blind_sign(params, keys.secret_shares[0], prepared.request), prepared.d);
  const std::vector<PartialCredential> one = {p};
  CHECK(aggregate_credentials(one) == p.credential);
}

TEST_CASE("randomize") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(40);
  const auto attrs = random_attrs(2, 1, rng);
  const auto issued = fixtures::issue(params, attrs, 2, 3, rng);
  const auto& cred = issued.credential;

  CHECK(testing::randomize_with(cred, Scalar::from_u64(1)) == cred);
  CHECK(verify_signature(params, issued.vk, randomize(cred, rng), attrs.values()));

  std::set<std::string> seen;
  for (int i = 0; i < 100; ++i) seen.insert(to_hex(wire::encode(randomize(cred, rng))));
  CHECK(seen.size() == 100);
}

TEST_CASE("prove_cred and verify_cred") {
  const Params params = setup(128, 3);
  testing::SeededRng rng(41);
  const auto attrs = random_attrs(3, 3, rng);
  const auto issued = fixtures::issue(params, attrs, 2, 3, rng);

  const auto show = prove_cred(params, issued.vk, issued.credential, attrs, Predicate::any(), rng);
  CHECK(verify_cred(params, issued.vk, show));

  SUBCASE("two shows share no group element") {
    const auto other = prove_cred(params, issued.vk, issued.credential, attrs, Predicate::any(), rng);
    CHECK(verify_cred(params, issued.vk, other));
    CHECK_FALSE(show.kappa == other.kappa);
    CHECK_FALSE(show.nu == other.nu);
    CHECK_FALSE(show.sigma.h == other.sigma.h);
    CHECK_FALSE(show.sigma.s == other.sigma.s);
  }
  SUBCASE("wrong key set") {
    const auto other = testing::ttp_keygen_with_dealer(params, 2, 3, rng);
    const auto wrong = aggregate_keys(other.keys.verification_shares);
    CHECK_FALSE(verify_cred(params, wrong, show));
  }
  SUBCASE("h' = identity") {
    auto bad = show;
    bad.sigma.h = G1::identity();
    bad.sigma.s = G1::identity();
    bad.nu = G1::identity();
    CHECK_FALSE(verify_cred(params, issued.vk, bad));
  }
  SUBCASE("credential for other attribute values") {
    auto wrong_attrs = random_attrs(3, 3, rng);
    CHECK_FALSE(verify_cred(params, issued.vk, prove_cred(params, issued.vk, issued.credential, wrong_attrs)));
  }
}

TEST_CASE("selective disclosure at show time") {
  const Params params = setup(128, 4);
  testing::SeededRng rng(42);
  const auto attrs = random_attrs(4, 4, rng);
  const auto issued = fixtures::issue(params, attrs, 1, 1, rng);

  const std::vector<std::size_t> reveal = {2, 4};
  const auto disclosed = attrs.with_public(reveal);
  const auto show = prove_cred(params, issued.vk, issued.credential, disclosed, Predicate::reveal({2, 4}), rng);
  CHECK(show.public_attrs.size() == 2);
  CHECK(show.proof.responses.size() == 3);
  CHECK(verify_cred(params, issued.vk, show, Predicate::reveal({2})));
  CHECK_FALSE(verify_cred(params, issued.vk, show, Predicate::reveal({1})));

  auto lied = show;
  lied.public_attrs[1].value += Scalar::from_u64(1);
  CHECK_FALSE(verify_cred(params, issued.vk, lied));
}

TEST_CASE("both sides of the verification equation expand to e(g1, g2)^((x + sum m y + r) r~)") {
  const Params params = setup(128, 2);
  testing::SeededRng rng(43);
  const auto d = testing::ttp_keygen_with_dealer(params, 2, 3, rng);
  const auto vk = testing::master_verification_key(params, d.master);
  const auto m = random_values(2, rng);

  // h = g1 * rt with rt known to the test.
  const Scalar rt = Scalar::random(rng), r_prime = Scalar::random(rng), r = Scalar::random(rng);
  const Credential cred = testing::sign_with_master(d.master, params.g1 * rt, m);
  const Credential sigma = testing::randomize_with(cred, r_prime);
  const G2 kappa = vk.alpha + vk.beta[0] * m[0] + vk.beta[1] * m[1] + params.g2 * r;
  const G1 nu = sigma.h * r;

  const Scalar exponent = (d.master.x + m[0] * d.master.y[0] + m[1] * d.master.y[1] + r) * rt * r_prime;
  const GT expected = pairing(params.g1, params.g2).pow(exponent);
  CHECK(pairing(sigma.h, kappa) == expected);
  CHECK(pairing(sigma.s + nu, params.g2) == expected);
}

TEST_CASE("deterministic h prevents the two-credential forgery") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(44);
  const auto d = testing::ttp_keygen_with_dealer(params, 1, 1, rng);
  const auto& sk = d.keys.secret_shares[0];
  const auto vk = aggregate_keys(d.keys.verification_shares);
  const AttributeVector m0({Scalar::from_u64(0)}), m1({Scalar::from_u64(1)}), m2({Scalar::from_u64(2)});

  SUBCASE("with h artificially fixed the forgery verifies") {
    const G1 h = hash_to_g1(params.g1 * Scalar::random(rng));
    const auto r0 = testing::prepare_blind_sign_fixed_h(params, m0, h, rng);
    const auto r1 = testing::prepare_blind_sign_fixed_h(params, m1, h, rng);
    const auto s0 = unblind(testing::blind_sign_fixed_h(params, sk, r0.request, h), r0.d).credential;
    const auto s1 = unblind(testing::blind_sign_fixed_h(params, sk, r1.request, h), r1.d).credential;
    const Credential forged{h, -s0.s + s1.s + s1.s};
    CHECK(verify_signature(params, vk, forged, m2.values()));
    CHECK(verify_cred(params, vk, prove_cred(params, vk, forged, m2, Predicate::any(), rng)));
  }
  SUBCASE("through the public API the construction fails") {
    const auto r0 = prepare_blind_sign(params, m0, Predicate::any(), rng);
    const auto r1 = prepare_blind_sign(params, m1, Predicate::any(), rng);
    const auto s0 = unblind(blind_sign(params, sk, r0.request), r0.d).credential;
    const auto s1 = unblind(blind_sign(params, sk, r1.request), r1.d).credential;
    CHECK_FALSE(s0.h == s1.h);
    for (const G1& h : {s0.h, s1.h}) {
      const Credential forged{h, -s0.s + s1.s + s1.s};
      CHECK_FALSE(verify_signature(params, vk, forged, m2.values()));
      CHECK_FALSE(verify_cred(params, vk, prove_cred(params, vk, forged, m2, Predicate::any(), rng)));
    }
  }
}

TEST_CASE("under-threshold aggregation never verifies") {
  const Params params = setup(128, 1);
  testing::SeededRng rng(45);
  const auto d = testing::ttp_keygen_with_dealer(params, 3, 4, rng);
  const auto vk = aggregate_keys(d.keys.verification_shares);
  const auto attrs = random_attrs(1, 1, rng);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  std::vector<PartialCredential> all;
  for (const auto& sk : d.keys.secret_shares) all.push_back(unblind(blind_sign(params, sk, prepared.request), prepared.d));

  for (unsigned mask = 1; mask < 16; ++mask) {
    std::vector<PartialCredential> subset;
    for (unsigned i = 0; i < 4; ++i)
      if (mask & (1u << i)) subset.push_back(all[i]);
    const bool enough = subset.size() >= 3;
    CHECK(verify_signature(params, vk, aggregate_credentials(subset), attrs.values()) == enough);
  }
}

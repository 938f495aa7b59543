#pragma once

// Honest statement/witness builders shared by the test suites.

#include <vector>

#include "tcred/nizk.hpp"
#include "tcred/scheme.hpp"
#include "tcred/testing.hpp"

namespace fixtures {

using namespace tcred;

inline std::vector<Scalar> random_values(std::size_t q, Rng& rng) {
  std::vector<Scalar> v(q);
  for (auto& s : v) s = Scalar::random(rng);
  return v;
}

/// q attributes of which the first `q_priv` are private.
inline AttributeVector random_attrs(std::size_t q, std::size_t q_priv, Rng& rng) {
  std::vector<std::size_t> pub;
  for (std::size_t pos = q_priv + 1; pos <= q; ++pos) pub.push_back(pos);
  return AttributeVector(random_values(q, rng), pub);
}

struct Issuance {
  IssuanceStatement statement;
  IssuanceWitness witness;
};

/// Built from the primitives directly, independent of prepare_blind_sign.
inline Issuance honest_issuance(const Params& params, const AttributeVector& attrs, Rng& rng) {
  Issuance out;
  const auto kp = elgamal_keygen(params, rng);
  out.witness.d = kp.d;
  out.witness.o = Scalar::random(rng);
  out.statement.gamma = kp.gamma;
  out.statement.commitment = commit(params, attrs.values(), out.witness.o);
  out.statement.h = hash_to_g1(out.statement.commitment);
  out.statement.public_attrs = attrs.public_attributes();
  for (const auto& m : attrs.private_values()) {
    const auto enc = elgamal_encrypt(params, kp.gamma, out.statement.h, m, rng);
    out.statement.ciphertexts.push_back(enc.ciphertext);
    out.witness.private_attrs.push_back(m);
    out.witness.k.push_back(enc.k);
  }
  return out;
}

struct Show {
  ShowStatement statement;
  ShowWitness witness;
};

/// Show statement over an arbitrary (h', s'); the proof relations do not
/// involve s'.
inline Show honest_show(const Params& params, const AggregatedVerificationKey& vk, const AttributeVector& attrs,
                        Rng& rng) {
  Show out;
  const G1 h = hash_to_g1(params.g1 * Scalar::random(rng));
  out.statement.sigma = Credential{h, params.g1 * Scalar::random(rng)};
  out.witness.r = Scalar::random(rng);
  out.witness.private_attrs = attrs.private_values();
  out.statement.kappa = vk.alpha + params.g2 * out.witness.r;
  const auto priv = attrs.private_positions();
  for (std::size_t i = 0; i < priv.size(); ++i)
    out.statement.kappa += vk.beta[priv[i] - 1] * out.witness.private_attrs[i];
  out.statement.nu = h * out.witness.r;
  out.statement.public_attrs = attrs.public_attributes();
  return out;
}

inline AggregatedVerificationKey random_vk(const Params& params, Rng& rng) {
  AggregatedVerificationKey vk;
  vk.alpha = params.g2 * Scalar::random(rng);
  for (std::size_t j = 0; j < params.q(); ++j) vk.beta.push_back(params.g2 * Scalar::random(rng));
  return vk;
}

/// Issues a credential on `attrs` end to end through the public API.
struct Issued {
  testing::DealerOutput dealer;
  AggregatedVerificationKey vk;
  Credential credential;
};

inline Issued issue(const Params& params, const AttributeVector& attrs, std::size_t t, std::size_t n, Rng& rng) {
  Issued out;
  out.dealer = testing::ttp_keygen_with_dealer(params, t, n, rng);
  std::vector<VerificationKeyShare> vks(out.dealer.keys.verification_shares.begin(),
                                        out.dealer.keys.verification_shares.begin() + t);
  out.vk = aggregate_keys(vks);
  const auto prepared = prepare_blind_sign(params, attrs, Predicate::any(), rng);
  std::vector<PartialCredential> partials;
  for (std::size_t i = 0; i < t; ++i)
    partials.push_back(unblind(blind_sign(params, out.dealer.keys.secret_shares[i], prepared.request), prepared.d));
  out.credential = aggregate_credentials(partials);
  return out;
}

}  // namespace fixtures

#pragma once

// Threshold-issued, re-randomizable credentials with selective disclosure.
//
// Issuance: the user commits to all q attributes, derives h from the
// commitment, ElGamal-encrypts h * m_j for each private attribute and proves
// all of it in zero knowledge. Each authority homomorphically turns the
// ciphertexts into an encryption of h * (x_i + sum_j y_{i,j} m_j); public
// attributes are folded in directly. The user decrypts the partials and
// interpolates any t of them in the exponent.

#include <span>
#include <vector>

#include "tcred/attributes.hpp"
#include "tcred/commit.hpp"
#include "tcred/errors.hpp"
#include "tcred/keys.hpp"
#include "tcred/nizk.hpp"

namespace tcred {

struct KeyGenOutput {
  std::vector<SecretKeyShare> secret_shares;
  std::vector<VerificationKeyShare> verification_shares;
};

/// Trusted-dealer key generation: q+1 random polynomials of degree t-1,
/// share i is their evaluation at i. The master secret never leaves this
/// function. Throws std::invalid_argument unless 1 <= t <= n.
KeyGenOutput ttp_keygen(const Params& params, std::size_t t, std::size_t n, Rng& rng = system_rng());

VerificationKeyShare verification_share(const Params& params, const SecretKeyShare& sk);

/// Lagrange basis at 0 over an arbitrary set of distinct, non-zero indices.
std::vector<Scalar> lagrange_coefficients(std::span<const AuthorityIndex> indices);

/// Lambda: everything an authority needs to sign blindly.
struct BlindSignRequest {
  G1 gamma;
  G1 commitment;
  std::vector<ElGamalCiphertext> ciphertexts;  // one per private position, ascending
  std::vector<PublicAttribute> public_attrs;
  Predicate predicate;
  IssuanceProof proof;

  IssuanceStatement statement(const G1& h) const;
};

struct PreparedRequest {
  Scalar d;  // ElGamal decryption key, kept by the user
  G1 h;
  BlindSignRequest request;
};

PreparedRequest prepare_blind_sign(const Params& params, const AttributeVector& attrs,
                                   const Predicate& predicate = Predicate::any(), Rng& rng = system_rng());

/// (h, c~) where c~ encrypts h * (x_i + sum_j y_{i,j} m_j) under gamma.
struct BlindedPartial {
  AuthorityIndex index = 0;
  G1 h;
  ElGamalCiphertext c;

  bool operator==(const BlindedPartial&) const = default;
};

/// Recomputes h from the commitment and checks the issuance proof before
/// signing. Throws ProtocolError(proof_invalid) on a bad proof or a
/// predicate the policy does not admit, ProtocolError(malformed) on
/// inconsistent lengths.
BlindedPartial blind_sign(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                          const Predicate& policy = Predicate::any());

PartialCredential unblind(const BlindedPartial& partial, const Scalar& d);

/// Throws std::invalid_argument on an empty set, duplicate indices or
/// mismatched key sizes.
AggregatedVerificationKey aggregate_keys(std::span<const VerificationKeyShare> shares);

/// Throws std::invalid_argument on an empty set, duplicate indices or
/// partials that disagree on h.
Credential aggregate_credentials(std::span<const PartialCredential> partials);

/// (h * r', s * r') for fresh non-zero r'.
Credential randomize(const Credential& cred, Rng& rng = system_rng());

/// Direct check e(h, alpha + sum_j beta_j m_j) == e(s, g2) with h != 1,
/// all attribute values known to the caller.
bool verify_signature(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                      std::span<const Scalar> values);

/// Same check against a single authority's key share.
bool verify_partial(const Params& params, const VerificationKeyShare& vk, const Credential& cred,
                    std::span<const Scalar> values);

/// Theta plus the disclosed attributes and predicate it was proven under.
struct ShowMaterial {
  G2 kappa;
  G1 nu;
  Credential sigma;  // re-randomized (h', s')
  ShowProof proof;
  std::vector<PublicAttribute> public_attrs;
  Predicate predicate;

  ShowStatement statement() const;
};

/// Re-randomizes `cred` internally, blinds kappa with fresh r and proves
/// knowledge of the private attributes of `attrs`. Public attributes of
/// `attrs` are disclosed; the verifier folds them into kappa.
ShowMaterial prove_cred(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                        const AttributeVector& attrs, const Predicate& predicate = Predicate::any(),
                        Rng& rng = system_rng());

/// True iff the show proof verifies, h' != 1, `policy` admits the
/// disclosed attributes and e(h', kappa + sum_pub beta_j m_j) == e(s' + nu, g2).
/// Never throws on malformed material.
bool verify_cred(const Params& params, const AggregatedVerificationKey& vk, const ShowMaterial& show,
                 const Predicate& policy = Predicate::any());

/// The pairing half of verify_cred alone (h' != 1 included).
bool show_pairing_holds(const Params& params, const AggregatedVerificationKey& vk, const ShowMaterial& show);

}  // namespace tcred

#pragma once

// Fiat-Shamir sigma-protocol proofs of knowledge of discrete-log
// representations.
//
// Responses are r_w = rand_w - c * w (mod p); the verifier rebuilds each
// prover commitment as base * r_w + statement * c and recomputes c.
//
// Response order on the wire:
//   issuance:  d, o, m_1..m_k, k_1..k_k   (m, k over private positions)
//   show:      m_1..m_k, r

#include <optional>
#include <string_view>
#include <vector>

#include "tcred/attributes.hpp"
#include "tcred/commit.hpp"
#include "tcred/keys.hpp"

namespace tcred {

inline constexpr std::string_view kIssuanceProofTag = "TCRED-PI-S";
inline constexpr std::string_view kShowProofTag = "TCRED-PI-V";
inline constexpr std::string_view kPetitionProofTag = "TCRED-PI-PET";

struct IssuanceProof {
  Scalar challenge;
  std::vector<Scalar> responses;  // 2 * q_priv + 2

  bool operator==(const IssuanceProof&) const = default;
};

struct ShowProof {
  Scalar challenge;
  std::vector<Scalar> responses;  // q_priv + 1

  bool operator==(const ShowProof&) const = default;
};

/// Public side of the issuance relation:
///   gamma = g1 * d
///   commitment = g1 * o + sum_j h_j * m_j            (all q positions)
///   ciphertexts[i] = (g1 * k_i, gamma * k_i + h * m_i)  (private positions)
struct IssuanceStatement {
  G1 gamma;
  G1 commitment;
  G1 h;  // must equal hash_to_g1(commitment)
  std::vector<ElGamalCiphertext> ciphertexts;
  std::vector<PublicAttribute> public_attrs;
  Predicate predicate;
};

struct IssuanceWitness {
  Scalar d;
  Scalar o;
  std::vector<Scalar> private_attrs;
  std::vector<Scalar> k;
};

/// Public side of the show relation:
///   kappa = alpha + sum_{j private} beta_j * m_j + g2 * r
///   nu = h_prime * r
struct ShowStatement {
  G2 kappa;
  G1 nu;
  Credential sigma;  // (h', s'), both bound into the challenge
  std::vector<PublicAttribute> public_attrs;
  Predicate predicate;
};

struct ShowWitness {
  std::vector<Scalar> private_attrs;
  Scalar r;
};

/// Petition extension: zeta = tag * m_key where m_key is the private
/// attribute at `key_position`, plus application payload bound into the
/// challenge.
struct NullifierStatement {
  G1 tag;  // g_s
  G1 zeta;
  std::size_t key_position = 1;
  Bytes payload;
};

IssuanceProof prove_issuance(const Params& params, const IssuanceStatement& stmt, const IssuanceWitness& witness,
                             Rng& rng = system_rng());
bool verify_issuance(const Params& params, const IssuanceStatement& stmt, const IssuanceProof& proof);

ShowProof prove_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                     const ShowWitness& witness, Rng& rng = system_rng());
bool verify_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                 const ShowProof& proof);

ShowProof prove_petition_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                              const NullifierStatement& nullifier, const ShowWitness& witness,
                              Rng& rng = system_rng());
bool verify_petition_show(const Params& params, const AggregatedVerificationKey& vk, const ShowStatement& stmt,
                          const NullifierStatement& nullifier, const ShowProof& proof);

}  // namespace tcred

#pragma once

#include <span>

#include "tcred/backend.hpp"

namespace tcred {

struct ElGamalKeyPair {
  Scalar d;  // decryption key, never zero
  G1 gamma;  // g1 * d
};

/// Encryption of h * m: (a, b) = (g1 * k, gamma * k + h * m).
struct ElGamalCiphertext {
  G1 a;
  G1 b;

  bool operator==(const ElGamalCiphertext&) const = default;
};

struct Encryption {
  ElGamalCiphertext ciphertext;
  Scalar k;  // encryption randomness; the issuance proof needs it as a witness
};

/// Pedersen commitment g1 * o + sum_j h_j * m_j over all q attributes.
/// Throws std::invalid_argument unless attributes.size() == params.q().
G1 commit(const Params& params, std::span<const Scalar> attributes, const Scalar& o);

ElGamalKeyPair elgamal_keygen(const Params& params, Rng& rng = system_rng());

/// Throws std::invalid_argument if `h` is the identity.
Encryption elgamal_encrypt(const Params& params, const G1& gamma, const G1& h, const Scalar& m,
                           Rng& rng = system_rng());

/// b - a * d
G1 elgamal_decrypt(const Scalar& d, const ElGamalCiphertext& c);

}  // namespace tcred

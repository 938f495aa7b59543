#include "tcred/commit.hpp"

#include <stdexcept>

namespace tcred {

G1 commit(const Params& params, std::span<const Scalar> attributes, const Scalar& o) {
  if (attributes.size() != params.q()) throw std::invalid_argument("commit: attribute count must equal q");
  G1 acc = params.g1 * o;
  for (std::size_t j = 0; j < attributes.size(); ++j) acc += params.hs[j] * attributes[j];
  return acc;
}

ElGamalKeyPair elgamal_keygen(const Params& params, Rng& rng) {
  ElGamalKeyPair kp;
  kp.d = Scalar::random(rng);
  kp.gamma = params.g1 * kp.d;
  return kp;
}

Encryption elgamal_encrypt(const Params& params, const G1& gamma, const G1& h, const Scalar& m, Rng& rng) {
  if (h.is_identity()) throw std::invalid_argument("elgamal_encrypt: h must not be the identity");
  Encryption enc;
  enc.k = Scalar::random(rng);
  enc.ciphertext.a = params.g1 * enc.k;
  enc.ciphertext.b = gamma * enc.k + h * m;
  return enc;
}

G1 elgamal_decrypt(const Scalar& d, const ElGamalCiphertext& c) { return c.b - c.a * d; }

}  // namespace tcred

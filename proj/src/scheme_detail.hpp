#pragma once

#include <optional>

#include "tcred/scheme.hpp"

namespace tcred::detail {

struct MasterKey {
  Scalar x;
  std::vector<Scalar> y;
};

// master_out, when non-null, receives (v(0), w(0)); otherwise it is wiped.
KeyGenOutput ttp_keygen(const Params& params, std::size_t t, std::size_t n, Rng& rng, MasterKey* master_out);

PreparedRequest prepare_blind_sign(const Params& params, const AttributeVector& attrs, const Predicate& predicate,
                                   Rng& rng, const std::optional<G1>& forced_h);

// Homomorphic signing step with no proof check.
BlindedPartial sign_ciphertexts(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                                const G1& h);

// Randomized sigma', kappa and nu with no proof yet; fills `witness`.
ShowMaterial begin_show(const Params& params, const AggregatedVerificationKey& vk, const Credential& cred,
                        const AttributeVector& attrs, const Predicate& predicate, Rng& rng, ShowWitness& witness);
void wipe(ShowWitness& witness);

}  // namespace tcred::detail

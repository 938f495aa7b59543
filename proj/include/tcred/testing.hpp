#pragma once

// Test-only hooks. Available only when the library is built with
// TCRED_TEST_HOOKS; production builds do not export these symbols.

#ifndef TCRED_TEST_HOOKS
#error "tcred/testing.hpp requires a build with TCRED_TEST_HOOKS enabled"
#endif

#include "tcred/scheme.hpp"

namespace tcred::testing {

/// (x, y_1..y_q) = (v(0), w_1(0)..w_q(0)).
struct MasterKey {
  Scalar x;
  std::vector<Scalar> y;
};

struct DealerOutput {
  KeyGenOutput keys;
  MasterKey master;
};

/// ttp_keygen that also hands back the master secret.
DealerOutput ttp_keygen_with_dealer(const Params& params, std::size_t t, std::size_t n, Rng& rng = system_rng());

/// Ground-truth signature (h, h * (x + sum_j y_j m_j)).
Credential sign_with_master(const MasterKey& master, const G1& h, std::span<const Scalar> values);

/// Ground-truth aggregated key (g2 * x, g2 * y_j).
AggregatedVerificationKey master_verification_key(const Params& params, const MasterKey& master);

/// randomize() with a caller-chosen exponent.
Credential randomize_with(const Credential& cred, const Scalar& r);

/// Request whose ciphertexts are built over `h` instead of hash_to_g1(c_m).
PreparedRequest prepare_blind_sign_fixed_h(const Params& params, const AttributeVector& attrs, const G1& h,
                                           Rng& rng = system_rng());

/// Authority that signs over a fixed `h` and skips the proof check.
BlindedPartial blind_sign_fixed_h(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                                  const G1& h);

/// Deterministic SplitMix64 byte stream for reproducible tests.
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::uint64_t state_;
};

}  // namespace tcred::testing

#include "tcred/testing.hpp"

#include "scheme_detail.hpp"

namespace tcred::testing {

DealerOutput ttp_keygen_with_dealer(const Params& params, std::size_t t, std::size_t n, Rng& rng) {
  detail::MasterKey master;
  DealerOutput out;
  out.keys = detail::ttp_keygen(params, t, n, rng, &master);
  out.master = MasterKey{master.x, master.y};
  return out;
}

Credential sign_with_master(const MasterKey& master, const G1& h, std::span<const Scalar> values) {
  Scalar e = master.x;
  for (std::size_t j = 0; j < values.size(); ++j) e += master.y.at(j) * values[j];
  return Credential{h, h * e};
}

AggregatedVerificationKey master_verification_key(const Params& params, const MasterKey& master) {
  AggregatedVerificationKey vk;
  vk.alpha = params.g2 * master.x;
  for (const auto& y : master.y) vk.beta.push_back(params.g2 * y);
  return vk;
}

Credential randomize_with(const Credential& cred, const Scalar& r) { return Credential{cred.h * r, cred.s * r}; }

PreparedRequest prepare_blind_sign_fixed_h(const Params& params, const AttributeVector& attrs, const G1& h,
                                           Rng& rng) {
  return detail::prepare_blind_sign(params, attrs, Predicate::any(), rng, h);
}

BlindedPartial blind_sign_fixed_h(const Params& params, const SecretKeyShare& sk, const BlindSignRequest& request,
                                  const G1& h) {
  return detail::sign_ciphertexts(params, sk, request, h);
}

void SeededRng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    b = static_cast<std::uint8_t>(z ^ (z >> 31));
  }
}

}  // namespace tcred::testing

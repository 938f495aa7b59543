#include "keystore.hpp"

#include <fstream>

#include <json.hpp>

namespace tcred::cli {

using json = nlohmann::json;

KeyStore KeyStore::create(const fs::path& dir, std::size_t t, std::size_t n, std::size_t q, Rng& rng) {
  if (t == 0 || n == 0 || t > n) throw UsageError("need 1 <= threshold <= authorities");
  if (q == 0) throw UsageError("need at least one attribute");
  if (fs::exists(dir / "store.json")) throw UsageError(dir.string() + " already holds a key store");
  fs::create_directories(dir);

  KeyStore ks{dir, setup(128, q), t, n};
  const Digest d = ks.digest();
  auto keys = ttp_keygen(ks.params, t, n, rng);
  save_bound(dir / "params", d, ks.params);
  for (auto& sk : keys.secret_shares) {
    save_bound(ks.sk_path(sk.index), d, sk);
    fs::permissions(ks.sk_path(sk.index), fs::perms::owner_read | fs::perms::owner_write);
    sk.wipe();
  }
  for (const auto& vk : keys.verification_shares) save_bound(ks.vk_path(vk.index), d, vk);

  std::ofstream(dir / "store.json") << json{{"threshold", t},
                                            {"authorities", n},
                                            {"attributes", q},
                                            {"params_digest", to_hex(d)}}
                                           .dump(2)
                                    << "\n";
  return ks;
}

KeyStore KeyStore::open(const fs::path& dir) {
  std::ifstream in(dir / "store.json");
  if (!in) throw UsageError("no key store at " + dir.string());
  KeyStore ks;
  ks.dir = dir;
  std::string digest_hex;
  try {
    const json j = json::parse(in);
    ks.threshold = j.at("threshold").get<std::size_t>();
    ks.authorities = j.at("authorities").get<std::size_t>();
    digest_hex = j.at("params_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw UsageError("store.json: " + std::string(e.what()));
  }
  const Bytes file = wire::read_file(dir / "params");
  const auto bound = wire::unbind(file);
  ks.params = wire::decode<Params>(bound.envelope);
  if (bound.params_digest != ks.digest() || to_hex(ks.digest()) != digest_hex)
    throw ProtocolError(Reason::params_mismatch, "key store files disagree on the params digest");
  return ks;
}

SecretKeyShare KeyStore::secret_share(AuthorityIndex i) const {
  auto sk = load_bound<SecretKeyShare>(sk_path(i), digest());
  if (sk.index != i) throw ProtocolError(Reason::malformed, sk_path(i).string() + " holds another index");
  return sk;
}

VerificationKeyShare KeyStore::verification_share(AuthorityIndex i) const {
  auto vk = load_bound<VerificationKeyShare>(vk_path(i), digest());
  if (vk.index != i) throw ProtocolError(Reason::malformed, vk_path(i).string() + " holds another index");
  return vk;
}

std::vector<VerificationKeyShare> KeyStore::verification_shares() const {
  std::vector<VerificationKeyShare> out;
  for (AuthorityIndex i = 1; i <= authorities; ++i)
    if (fs::exists(vk_path(i))) out.push_back(verification_share(i));
  return out;
}

AggregatedVerificationKey KeyStore::aggregated_key() const {
  if (fs::exists(agg_vk_path())) return load_bound<AggregatedVerificationKey>(agg_vk_path(), digest());
  const auto shares = verification_shares();
  if (shares.size() < threshold) throw UsageError("fewer verification shares than the threshold");
  return aggregate_keys(std::span(shares).first(threshold));
}

}  // namespace tcred::cli

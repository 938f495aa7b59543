#pragma once

// On-disk layout used by the command-line tool.
//
//   DIR/store.json   {"threshold", "authorities", "attributes", "params_digest"}
//   DIR/params       Params
//   DIR/sk-<i>       SecretKeyShare (plaintext!)
//   DIR/vk-<i>       VerificationKeyShare
//   DIR/vk           AggregatedVerificationKey, after aggregate-keys
//
// Every binary file is a bound envelope: the params digest followed by the
// object's own envelope. Loading checks the digest against the store.

#include <filesystem>

#include "tcred/errors.hpp"
#include "tcred/scheme.hpp"
#include "tcred/wire.hpp"

namespace tcred::cli {

namespace fs = std::filesystem;

/// Bad flags or unusable inputs; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
void save_bound(const fs::path& path, const Digest& digest, const T& object) {
  wire::write_file(path, wire::bind(digest, wire::encode(object)));
}

/// Throws ProtocolError(params_mismatch) if the file belongs to other
/// params, wire::WireError if it does not parse.
template <class T>
T load_bound(const fs::path& path, const Digest& digest) {
  const Bytes file = wire::read_file(path);
  const auto bound = wire::unbind(file);
  if (bound.params_digest != digest)
    throw ProtocolError(Reason::params_mismatch, path.string() + " was made for different params");
  return wire::decode<T>(bound.envelope);
}

struct KeyStore {
  fs::path dir;
  Params params;
  std::size_t threshold = 0;
  std::size_t authorities = 0;

  Digest digest() const { return params.digest(); }
  fs::path sk_path(AuthorityIndex i) const { return dir / ("sk-" + std::to_string(i)); }
  fs::path vk_path(AuthorityIndex i) const { return dir / ("vk-" + std::to_string(i)); }
  fs::path agg_vk_path() const { return dir / "vk"; }

  /// Dealer-mode generation into an empty or missing directory.
  static KeyStore create(const fs::path& dir, std::size_t t, std::size_t n, std::size_t q, Rng& rng = system_rng());
  static KeyStore open(const fs::path& dir);

  SecretKeyShare secret_share(AuthorityIndex i) const;
  VerificationKeyShare verification_share(AuthorityIndex i) const;
  std::vector<VerificationKeyShare> verification_shares() const;
  /// The aggregated key file, or aggregation of every vk share if absent.
  AggregatedVerificationKey aggregated_key() const;
};

}  // namespace tcred::cli

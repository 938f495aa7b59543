#pragma once

// Unlinkable petition signing with a per-petition nullifier.
//
// A citizen holding a credential with a private key attribute k publishes
// zeta = g_s * k, where g_s is derived from the petition id, together with a
// show proof that binds zeta, k and the chosen option. The petition keeps
// the set of spent zeta values so each key signs at most once.
//
// State file: an 8-byte magic, then append-only records
//
//   length (u32 BE) | payload | first 8 bytes of sha256(payload)
//
// The first record is the header (id, options, aggregated vk); each further
// record is one accepted SignaturePacket envelope.

#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "tcred/errors.hpp"
#include "tcred/scheme.hpp"

namespace tcred::petition {

inline constexpr std::string_view kTagDomain = "TCRED-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_PETITION_";

/// g_s for a petition id.
G1 petition_tag(ByteView id);

struct SignaturePacket {
  G1 zeta;
  std::uint16_t option = 0;
  std::uint16_t key_position = 1;
  ShowMaterial show;  // proof is a petition show proof
};

Bytes encode(const SignaturePacket& packet);
/// Throws wire::WireError.
SignaturePacket decode_packet(ByteView bytes);

/// Bytes hashed into the proof challenge for an option.
Bytes option_payload(std::size_t option, std::string_view text);

struct Outcome {
  bool accepted = false;
  std::optional<Reason> reason;
  std::string detail;
};

struct Tally {
  std::vector<std::size_t> counts;  // per option
  std::size_t total = 0;
};

class Petition {
 public:
  /// Throws std::invalid_argument on empty or duplicate options.
  Petition(Bytes id, AggregatedVerificationKey vk, std::vector<std::string> options);

  Petition(const Petition&) = delete;
  Petition& operator=(const Petition&) = delete;

  const Bytes& id() const { return id_; }
  const G1& tag() const { return tag_; }
  const Params& params() const { return params_; }
  const AggregatedVerificationKey& vk() const { return vk_; }
  const std::vector<std::string>& options() const { return options_; }

  /// Creates a state file holding the header; refuses to overwrite.
  void create_journal(const std::filesystem::path& path);
  /// Replays a state file, re-verifying every record. A torn final record
  /// from an interrupted append is dropped; any other damage throws.
  static std::unique_ptr<Petition> load(const std::filesystem::path& path);

  /// Verifies the packet and, in one critical section, checks zeta against
  /// the spent set, inserts it and appends the record to the journal.
  Outcome verify_and_record(const SignaturePacket& packet);
  /// Proof and pairing checks only; no state change.
  Outcome verify(const SignaturePacket& packet) const;

  Tally tally() const;
  bool spent(const G1& zeta) const;

 private:
  void append(ByteView record);

  Bytes id_;
  G1 tag_;
  Params params_;
  AggregatedVerificationKey vk_;
  std::vector<std::string> options_;

  mutable std::shared_mutex mutex_;
  std::set<Bytes> spent_;
  std::vector<std::size_t> counts_;
  std::optional<std::filesystem::path> journal_;
};

/// zeta = g_s * attrs[key_position] plus the petition show proof. The key
/// attribute must be private in `attrs`.
SignaturePacket petition_sign(const Petition& petition, const Credential& cred, const AttributeVector& attrs,
                              std::size_t key_position, std::size_t option, Rng& rng = system_rng());

}  // namespace tcred::petition

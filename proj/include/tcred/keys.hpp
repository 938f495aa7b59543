#pragma once

#include <cstdint>
#include <vector>

#include "tcred/backend.hpp"

namespace tcred {

using AuthorityIndex = std::uint32_t;

/// Authority i's share (v(i), w_1(i), ..., w_q(i)) of the master key.
struct SecretKeyShare {
  AuthorityIndex index = 0;
  Scalar x;
  std::vector<Scalar> y;

  void wipe() {
    x.wipe();
    for (auto& s : y) s.wipe();
  }
};

struct VerificationKeyShare {
  AuthorityIndex index = 0;
  G2 alpha;              // g2 * x_i
  std::vector<G2> beta;  // g2 * y_{i,j}

  bool operator==(const VerificationKeyShare&) const = default;
};

struct AggregatedVerificationKey {
  G2 alpha;
  std::vector<G2> beta;
  std::vector<AuthorityIndex> indices;  // shares it was interpolated from

  /// Hash of (alpha, beta); the index set is not part of the key's identity.
  Digest digest() const;

  bool operator==(const AggregatedVerificationKey&) const = default;
};

/// A credential is two G1 elements, partial or consolidated.
struct Credential {
  G1 h;
  G1 s;

  bool operator==(const Credential&) const = default;
};

struct PartialCredential {
  AuthorityIndex index = 0;
  Credential credential;
};

}  // namespace tcred

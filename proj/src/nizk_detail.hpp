#pragma once

#include "tcred/nizk.hpp"

namespace tcred::detail {

// verify_issuance for a caller that derived stmt.h from the commitment
// itself and already checked it is not the identity.
bool verify_issuance_trusted_h(const Params& params, const IssuanceStatement& stmt, const IssuanceProof& proof);

}  // namespace tcred::detail

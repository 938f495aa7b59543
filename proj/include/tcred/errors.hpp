#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcred {

/// Machine-readable rejection reasons shared by the library, the issuer
/// service and the CLI.
enum class Reason {
  proof_invalid,
  params_mismatch,
  malformed,
  threshold_unreachable,
  double_sign,
  rate_limited,
  unknown_option,
};

std::string_view to_string(Reason reason);

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(Reason reason, const std::string& detail)
      : std::runtime_error(std::string(to_string(reason)) + ": " + detail), reason_(reason) {}

  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

}  // namespace tcred

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tcred/backend.hpp"

namespace tcred {

/// An attribute disclosed in the clear. Positions are 1-based.
struct PublicAttribute {
  std::size_t position = 0;
  Scalar value;

  bool operator==(const PublicAttribute&) const = default;
};

/// The q attribute values of a credential and which of them are hidden.
class AttributeVector {
 public:
  AttributeVector() = default;

  /// All attributes private.
  explicit AttributeVector(std::vector<Scalar> values);
  /// `public_positions` are 1-based and must lie in [1, q].
  AttributeVector(std::vector<Scalar> values, std::span<const std::size_t> public_positions);

  std::size_t size() const { return values_.size(); }
  const std::vector<Scalar>& values() const { return values_; }
  const Scalar& at(std::size_t position) const { return values_.at(position - 1); }
  bool is_public(std::size_t position) const { return public_.at(position - 1); }

  std::vector<std::size_t> private_positions() const;
  std::vector<Scalar> private_values() const;
  std::vector<PublicAttribute> public_attributes() const;

  /// Same values, with exactly `public_positions` disclosed.
  AttributeVector with_public(std::span<const std::size_t> public_positions) const;

 private:
  std::vector<Scalar> values_;
  std::vector<bool> public_;
};

/// Positions in [1, q] that are not listed in `public_attrs`, ascending.
/// Throws std::invalid_argument if the public positions are out of range,
/// repeated, or not strictly increasing.
std::vector<std::size_t> private_positions_for(std::size_t q, std::span<const PublicAttribute> public_attrs);

/// Application predicate attached to issuance and showing.
///
/// The shipped predicates are "true" (no constraint beyond knowledge of the
/// credential) and "these positions must be disclosed". The descriptor is
/// hashed into every proof challenge.
struct Predicate {
  std::vector<std::size_t> revealed;  // ascending, 1-based

  static Predicate any() { return {}; }
  static Predicate reveal(std::vector<std::size_t> positions);

  Bytes descriptor() const;
  bool admits(std::span<const PublicAttribute> public_attrs) const;

  bool operator==(const Predicate&) const = default;
};

}  // namespace tcred

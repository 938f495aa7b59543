#include "tcred/attributes.hpp"

#include <algorithm>
#include <stdexcept>

namespace tcred {

AttributeVector::AttributeVector(std::vector<Scalar> values)
    : values_(std::move(values)), public_(values_.size(), false) {}

AttributeVector::AttributeVector(std::vector<Scalar> values, std::span<const std::size_t> public_positions)
    : values_(std::move(values)), public_(values_.size(), false) {
  for (std::size_t pos : public_positions) {
    if (pos == 0 || pos > values_.size()) throw std::invalid_argument("public attribute position out of range");
    public_[pos - 1] = true;
  }
}

std::vector<std::size_t> AttributeVector::private_positions() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!public_[i]) out.push_back(i + 1);
  return out;
}

std::vector<Scalar> AttributeVector::private_values() const {
  std::vector<Scalar> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!public_[i]) out.push_back(values_[i]);
  return out;
}

std::vector<PublicAttribute> AttributeVector::public_attributes() const {
  std::vector<PublicAttribute> out;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (public_[i]) out.push_back({i + 1, values_[i]});
  return out;
}

AttributeVector AttributeVector::with_public(std::span<const std::size_t> public_positions) const {
  return AttributeVector(values_, public_positions);
}

std::vector<std::size_t> private_positions_for(std::size_t q, std::span<const PublicAttribute> public_attrs) {
  std::vector<bool> is_public(q, false);
  std::size_t last = 0;
  for (const auto& attr : public_attrs) {
    if (attr.position == 0 || attr.position > q) throw std::invalid_argument("public attribute position out of range");
    if (attr.position <= last) throw std::invalid_argument("public attribute positions must be strictly increasing");
    last = attr.position;
    is_public[attr.position - 1] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < q; ++i)
    if (!is_public[i]) out.push_back(i + 1);
  return out;
}

Predicate Predicate::reveal(std::vector<std::size_t> positions) {
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  if (!positions.empty() && positions.front() == 0) throw std::invalid_argument("predicate position 0");
  return Predicate{std::move(positions)};
}

Bytes Predicate::descriptor() const {
  Transcript t;
  if (revealed.empty()) {
    t.append_label("true");
  } else {
    t.append_label("reveal").append_u64(revealed.size());
    for (auto p : revealed) t.append_u64(p);
  }
  return t.bytes();
}

bool Predicate::admits(std::span<const PublicAttribute> public_attrs) const {
  return std::all_of(revealed.begin(), revealed.end(), [&](std::size_t pos) {
    return std::any_of(public_attrs.begin(), public_attrs.end(),
                       [pos](const PublicAttribute& a) { return a.position == pos; });
  });
}

}  // namespace tcred

#include "toolsel/core/attributes.hpp"

#include <cmath>

#include "toolsel/core/error.hpp"

namespace toolsel {

const std::array<std::string_view, kAttributeCount>& canonical_attribute_order() {
  static constexpr std::array<std::string_view, kAttributeCount> kNames = {
      "elongation",     "spiky",          "size",
      "smoothness",     "texturedness",   "hardness",
      "graspability",   "hand_relatedness", "force_requirement",
      "body_extension", "threatness",     "valence",
      "arousal",
  };
  return kNames;
}

std::string_view attribute_name(std::size_t index) {
  if (index >= kAttributeCount) {
    throw InvalidArgument("core", "attribute index " + std::to_string(index) + " out of range");
  }
  return canonical_attribute_order()[index];
}

std::string_view attribute_name(Attribute a) { return attribute_name(index_of(a)); }

std::optional<std::size_t> attribute_index(std::string_view name) {
  const auto& names = canonical_attribute_order();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

std::string VectorCheck::describe() const {
  switch (violation) {
    case VectorViolation::none:
      return "ok";
    case VectorViolation::length:
      return "expected " + std::to_string(kAttributeCount) + " values";
    case VectorViolation::non_finite:
      return "non-finite value at index " + std::to_string(index);
    case VectorViolation::out_of_range:
      return "value at index " + std::to_string(index) + " (" +
             std::string(attribute_name(index)) + ") outside [1,7]";
  }
  return "unknown";
}

VectorCheck validate_attribute_vector(std::span<const double> values, bool ground_truth) {
  if (values.size() != kAttributeCount) return {VectorViolation::length, 0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) return {VectorViolation::non_finite, i};
    if (ground_truth && (values[i] < kRatingMin || values[i] > kRatingMax)) {
      return {VectorViolation::out_of_range, i};
    }
  }
  return {};
}

AttributeVector to_attribute_vector(std::span<const double> values, bool ground_truth) {
  const VectorCheck check = validate_attribute_vector(values, ground_truth);
  if (!check.ok()) throw InvalidArgument("core", check.describe());
  AttributeVector out{};
  std::copy(values.begin(), values.end(), out.begin());
  return out;
}

}  // namespace toolsel

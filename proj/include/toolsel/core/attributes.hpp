#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace toolsel {

inline constexpr std::size_t kAttributeCount = 13;

// Ratings are collected on a 1..7 scale.
inline constexpr double kRatingMin = 1.0;
inline constexpr double kRatingMax = 7.0;

enum class Attribute : std::size_t {
  elongation = 0,
  spiky,
  size,
  smoothness,
  texturedness,
  hardness,
  graspability,
  hand_relatedness,
  force_requirement,
  body_extension,
  threatness,
  valence,
  arousal,
};

// A point in the shared attribute space, indexed in registry order.
using AttributeVector = std::array<double, kAttributeCount>;

// Integer ratings after rounding, also in registry order.
using RatingVector = std::array<int, kAttributeCount>;

// The 13 attribute names in the fixed order used by every file and report.
const std::array<std::string_view, kAttributeCount>& canonical_attribute_order();

std::string_view attribute_name(std::size_t index);
std::string_view attribute_name(Attribute a);

// Registry index of a snake_case name, or nullopt.
std::optional<std::size_t> attribute_index(std::string_view name);

constexpr std::size_t index_of(Attribute a) { return static_cast<std::size_t>(a); }

enum class VectorViolation { none, length, non_finite, out_of_range };

struct VectorCheck {
  VectorViolation violation = VectorViolation::none;
  std::size_t index = 0;  // first offending index; meaningless for length

  bool ok() const { return violation == VectorViolation::none; }
  std::string describe() const;
};

// Ground-truth vectors must lie in [1,7]; predictions only need length 13 and
// finite values.
VectorCheck validate_attribute_vector(std::span<const double> values, bool ground_truth);

// Throws InvalidArgument if the check fails.
AttributeVector to_attribute_vector(std::span<const double> values, bool ground_truth);

}  // namespace toolsel

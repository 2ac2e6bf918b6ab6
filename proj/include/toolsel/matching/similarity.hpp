#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "toolsel/core/attributes.hpp"

namespace toolsel::matching {

enum class SimilarityMetric { cosine, negative_euclidean };

std::string_view metric_name(SimilarityMetric m);
// Accepts "cosine", "euclid" and "negative_euclidean".
std::optional<SimilarityMetric> parse_metric(std::string_view s);

// Attribute indices deleted before similarity computation.
class AblationMask {
 public:
  AblationMask() = default;
  // Throws InvalidArgument for indices > 12 or when all 13 are removed.
  explicit AblationMask(std::set<std::size_t> removed);

  static AblationMask removing(std::size_t index) { return AblationMask({index}); }

  const std::set<std::size_t>& removed() const { return removed_; }
  bool empty() const { return removed_.empty(); }
  bool keeps(std::size_t index) const { return !removed_.contains(index); }
  std::size_t kept_count() const { return kAttributeCount - removed_.size(); }

  friend bool operator==(const AblationMask&, const AblationMask&) = default;

 private:
  std::set<std::size_t> removed_;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);
double negative_euclidean(std::span<const double> a, std::span<const double> b);
double similarity(SimilarityMetric metric, std::span<const double> a, std::span<const double> b);

// Survivors of the mask, in registry order.
std::vector<double> apply_mask(const AttributeVector& v, const AblationMask& mask);

using CandidateId = std::uint64_t;

struct Candidate {
  CandidateId id = 0;
  AttributeVector attributes{};
};

struct ScoredCandidate {
  CandidateId id = 0;
  double score = 0.0;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

// Descending score, ties by ascending id. Metric errors are rethrown naming
// the offending candidate.
std::vector<ScoredCandidate> rank_candidates(const AttributeVector& query,
                                             std::span<const Candidate> candidates,
                                             SimilarityMetric metric,
                                             const AblationMask& mask = {});

ScoredCandidate select_tool(const AttributeVector& query, std::span<const Candidate> candidates,
                            SimilarityMetric metric, const AblationMask& mask = {});

}  // namespace toolsel::matching

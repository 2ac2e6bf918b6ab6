#include "toolsel/matching/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "toolsel/core/error.hpp"

namespace toolsel::matching {

std::string_view metric_name(SimilarityMetric m) {
  return m == SimilarityMetric::cosine ? "cosine" : "negative_euclidean";
}

std::optional<SimilarityMetric> parse_metric(std::string_view s) {
  if (s == "cosine") return SimilarityMetric::cosine;
  if (s == "euclid" || s == "negative_euclidean") return SimilarityMetric::negative_euclidean;
  return std::nullopt;
}

AblationMask::AblationMask(std::set<std::size_t> removed) : removed_(std::move(removed)) {
  for (const std::size_t i : removed_) {
    if (i >= kAttributeCount) {
      throw InvalidArgument("matching", "mask index " + std::to_string(i) + " out of range");
    }
  }
  if (removed_.size() >= kAttributeCount) {
    throw InvalidArgument("matching", "mask removes every attribute");
  }
}

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("matching", "length mismatch: " + std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()));
  }
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw NumericError("matching", "cosine of a zero-norm vector");
  const double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

double negative_euclidean(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return -std::sqrt(sum);
}

double similarity(SimilarityMetric metric, std::span<const double> a, std::span<const double> b) {
  return metric == SimilarityMetric::cosine ? cosine_similarity(a, b) : negative_euclidean(a, b);
}

std::vector<double> apply_mask(const AttributeVector& v, const AblationMask& mask) {
  std::vector<double> out;
  out.reserve(mask.kept_count());
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    if (mask.keeps(i)) out.push_back(v[i]);
  }
  return out;
}

std::vector<ScoredCandidate> rank_candidates(const AttributeVector& query,
                                             std::span<const Candidate> candidates,
                                             SimilarityMetric metric, const AblationMask& mask) {
  if (candidates.empty()) throw InvalidArgument("matching", "no candidates to rank");
  const std::vector<double> q = apply_mask(query, mask);
  std::vector<ScoredCandidate> scored;
  scored.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    const std::vector<double> v = apply_mask(c.attributes, mask);
    try {
      scored.push_back({c.id, similarity(metric, q, v)});
    } catch (const NumericError& e) {
      throw NumericError("matching", "candidate " + std::to_string(c.id) + ": " + e.what());
    }
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredCandidate& x, const ScoredCandidate& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.id < y.id;
  });
  return scored;
}

ScoredCandidate select_tool(const AttributeVector& query, std::span<const Candidate> candidates,
                            SimilarityMetric metric, const AblationMask& mask) {
  return rank_candidates(query, candidates, metric, mask).front();
}

}  // namespace toolsel::matching

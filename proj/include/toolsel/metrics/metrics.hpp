#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "toolsel/core/records.hpp"
#include "toolsel/encoders/provider.hpp"
#include "toolsel/encoders/train.hpp"
#include "toolsel/matching/similarity.hpp"

namespace toolsel::metrics {

struct Count {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;

  double value() const {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Count&, const Count&) = default;
};

struct AttributeCount {
  std::size_t attribute_index = 0;
  Count count;
};

// Accuracy as an exact ratio of integer counts.
struct EvaluationReport {
  std::string metric_name;
  Count count;
  std::vector<AttributeCount> per_attribute;  // attribute-wise accuracy only
  std::vector<std::string> flagged;           // items/trials counted as failures
  nlohmann::json config = nlohmann::json::object();

  double value() const { return count.value(); }
};

nlohmann::json to_json(const EvaluationReport& report);

// Clamp to [1,7] then round halves up. Throws NumericError on non-finite x.
int round_half_up_clamped(double x);
RatingVector round_ratings(const AttributeVector& v);

// Micro-average over (sample, kept attribute) cells of exact rounded match.
EvaluationReport attribute_wise_accuracy(std::span<const AttributeVector> preds,
                                         std::span<const RatingVector> truths,
                                         const matching::AblationMask& mask = {});

struct LabeledPrediction {
  ToolId tool_id = 0;  // ground truth
  AttributeVector attributes{};
};

// Fraction of predictions whose cosine-nearest catalog entry is the true
// tool; ties go to the lower tool_id. Zero-norm predictions are failures.
EvaluationReport most_similar_class_accuracy(std::span<const LabeledPrediction> preds,
                                             const ToolCatalog& catalog,
                                             const matching::AblationMask& mask = {});

struct MatchingOptions {
  matching::SimilarityMetric metric = matching::SimilarityMetric::cosine;
  matching::AblationMask mask;
  bool clamp_predictions = false;  // clamp to [1,7] before scoring
};

struct TrialOutcome {
  std::uint64_t trial_id = 0;
  ItemId target_item_id = 0;
  std::optional<ItemId> selected_item_id;
  bool correct = false;
  std::vector<matching::ScoredCandidate> ranking;  // ids are item ids
  std::string error;
};

struct MatchingEvaluation {
  EvaluationReport report;
  std::vector<TrialOutcome> trials;
};

// Query = scenario prediction, candidates = visual predictions of the ten
// candidate items. Missing predictions throw; metric errors fail the trial.
MatchingEvaluation matching_accuracy(std::span<const MatchingTrial> trials,
                                     const encoders::PredictionTable& scenario_preds,
                                     const encoders::PredictionTable& visual_preds,
                                     const MatchingOptions& options = {});

MatchingEvaluation matching_accuracy(std::span<const MatchingTrial> trials,
                                     const encoders::TrainedHead& language_head,
                                     const encoders::TrainedHead& visual_head,
                                     const encoders::EmbeddingProvider& scenario_provider,
                                     const encoders::EmbeddingProvider& visual_provider,
                                     const MatchingOptions& options = {});

// Accuracy of an arbitrary position chooser over the same trials.
EvaluationReport selection_accuracy(std::span<const MatchingTrial> trials,
                                    const std::function<std::size_t(const MatchingTrial&)>& choose);

// Baseline that always picks candidate slot 0.
EvaluationReport first_slot_accuracy(std::span<const MatchingTrial> trials);

}  // namespace toolsel::metrics

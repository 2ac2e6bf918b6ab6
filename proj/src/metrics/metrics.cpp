#include "toolsel/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "toolsel/core/error.hpp"

namespace toolsel::metrics {

namespace {

nlohmann::json mask_json(const matching::AblationMask& mask) {
  nlohmann::json removed = nlohmann::json::array();
  for (const std::size_t i : mask.removed()) removed.push_back(attribute_name(i));
  return removed;
}

AttributeVector clamped(const AttributeVector& v) {
  AttributeVector out = v;
  for (double& x : out) x = std::clamp(x, kRatingMin, kRatingMax);
  return out;
}

}  // namespace

nlohmann::json to_json(const EvaluationReport& report) {
  nlohmann::json j;
  j["metric_name"] = report.metric_name;
  j["value"] = report.value();
  j["numerator"] = report.count.numerator;
  j["denominator"] = report.count.denominator;
  if (!report.per_attribute.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& a : report.per_attribute) {
      rows.push_back({{"attribute", attribute_name(a.attribute_index)},
                      {"numerator", a.count.numerator},
                      {"denominator", a.count.denominator},
                      {"value", a.count.value()}});
    }
    j["per_attribute"] = rows;
  }
  if (!report.flagged.empty()) j["flagged"] = report.flagged;
  j["config"] = report.config;
  return j;
}

int round_half_up_clamped(double x) {
  if (!std::isfinite(x)) throw NumericError("metrics", "cannot round a non-finite value");
  const double c = std::clamp(x, kRatingMin, kRatingMax);
  return static_cast<int>(std::floor(c + 0.5));
}

RatingVector round_ratings(const AttributeVector& v) {
  RatingVector out{};
  for (std::size_t i = 0; i < kAttributeCount; ++i) out[i] = round_half_up_clamped(v[i]);
  return out;
}

EvaluationReport attribute_wise_accuracy(std::span<const AttributeVector> preds,
                                         std::span<const RatingVector> truths,
                                         const matching::AblationMask& mask) {
  if (preds.size() != truths.size()) {
    throw InvalidArgument("metrics", "attribute_wise_accuracy: " + std::to_string(preds.size()) +
                                         " predictions vs " + std::to_string(truths.size()) +
                                         " truths");
  }
  EvaluationReport report;
  report.metric_name = "attribute_wise_accuracy";
  report.config = {{"mask", mask_json(mask)}};
  for (std::size_t a = 0; a < kAttributeCount; ++a) {
    if (mask.keeps(a)) report.per_attribute.push_back({a, {}});
  }
  for (std::size_t n = 0; n < preds.size(); ++n) {
    for (auto& cell : report.per_attribute) {
      const std::size_t a = cell.attribute_index;
      ++cell.count.denominator;
      if (round_half_up_clamped(preds[n][a]) == truths[n][a]) ++cell.count.numerator;
    }
  }
  for (const auto& cell : report.per_attribute) {
    report.count.numerator += cell.count.numerator;
    report.count.denominator += cell.count.denominator;
  }
  return report;
}

EvaluationReport most_similar_class_accuracy(std::span<const LabeledPrediction> preds,
                                             const ToolCatalog& catalog,
                                             const matching::AblationMask& mask) {
  if (catalog.size() == 0) throw InvalidArgument("metrics", "catalog is empty");
  std::vector<matching::Candidate> candidates;
  candidates.reserve(catalog.size());
  for (const ToolRecord& t : catalog.tools()) candidates.push_back({t.tool_id, t.attributes});

  EvaluationReport report;
  report.metric_name = "most_similar_class_accuracy";
  report.config = {{"metric", "cosine"}, {"mask", mask_json(mask)}};
  for (std::size_t n = 0; n < preds.size(); ++n) {
    ++report.count.denominator;
    try {
      const auto best = matching::select_tool(preds[n].attributes, candidates,
                                              matching::SimilarityMetric::cosine, mask);
      if (best.id == preds[n].tool_id) ++report.count.numerator;
    } catch (const NumericError& e) {
      report.flagged.push_back("sample " + std::to_string(n) + ": " + e.what());
    }
  }
  return report;
}

MatchingEvaluation matching_accuracy(std::span<const MatchingTrial> trials,
                                     const encoders::PredictionTable& scenario_preds,
                                     const encoders::PredictionTable& visual_preds,
                                     const MatchingOptions& options) {
  auto lookup = [](const encoders::PredictionTable& table, ItemId id, const char* what) {
    const auto it = table.find(id);
    if (it == table.end()) {
      throw InvalidArgument("metrics", std::string("no ") + what + " prediction for item " +
                                           std::to_string(id));
    }
    return it->second;
  };

  MatchingEvaluation eval;
  eval.report.metric_name = "matching_accuracy";
  eval.report.config = {{"metric", matching::metric_name(options.metric)},
                        {"mask", mask_json(options.mask)},
                        {"clamp_predictions", options.clamp_predictions}};

  for (const MatchingTrial& trial : trials) {
    if (trial.target_position >= kTrialCandidates) {
      throw InvalidArgument("metrics", "trial " + std::to_string(trial.trial_id) +
                                           " has target_position out of range");
    }
    AttributeVector query = lookup(scenario_preds, trial.scenario_item_id, "scenario");
    std::vector<matching::Candidate> candidates;
    for (const ItemId id : trial.candidate_item_ids) {
      candidates.push_back({id, lookup(visual_preds, id, "visual")});
    }
    if (options.clamp_predictions) {
      query = clamped(query);
      for (auto& c : candidates) c.attributes = clamped(c.attributes);
    }

    TrialOutcome outcome;
    outcome.trial_id = trial.trial_id;
    outcome.target_item_id = trial.target_item_id();
    ++eval.report.count.denominator;
    try {
      outcome.ranking = matching::rank_candidates(query, candidates, options.metric, options.mask);
      outcome.selected_item_id = outcome.ranking.front().id;
      outcome.correct = *outcome.selected_item_id == outcome.target_item_id;
    } catch (const NumericError& e) {
      outcome.error = e.what();
      eval.report.flagged.push_back("trial " + std::to_string(trial.trial_id) + ": " + e.what());
    }
    if (outcome.correct) ++eval.report.count.numerator;
    eval.trials.push_back(std::move(outcome));
  }
  return eval;
}

MatchingEvaluation matching_accuracy(std::span<const MatchingTrial> trials,
                                     const encoders::TrainedHead& language_head,
                                     const encoders::TrainedHead& visual_head,
                                     const encoders::EmbeddingProvider& scenario_provider,
                                     const encoders::EmbeddingProvider& visual_provider,
                                     const MatchingOptions& options) {
  std::vector<ItemId> scenario_items;
  std::vector<ItemId> visual_items;
  for (const MatchingTrial& t : trials) {
    scenario_items.push_back(t.scenario_item_id);
    visual_items.insert(visual_items.end(), t.candidate_item_ids.begin(),
                        t.candidate_item_ids.end());
  }
  const auto scenario_preds =
      encoders::predict_items(language_head.head, scenario_provider, scenario_items);
  const auto visual_preds = encoders::predict_items(visual_head.head, visual_provider, visual_items);
  return matching_accuracy(trials, scenario_preds, visual_preds, options);
}

EvaluationReport selection_accuracy(std::span<const MatchingTrial> trials,
                                    const std::function<std::size_t(const MatchingTrial&)>& choose) {
  EvaluationReport report;
  report.metric_name = "selection_accuracy";
  for (const MatchingTrial& t : trials) {
    ++report.count.denominator;
    if (choose(t) == t.target_position) ++report.count.numerator;
  }
  return report;
}

EvaluationReport first_slot_accuracy(std::span<const MatchingTrial> trials) {
  EvaluationReport report = selection_accuracy(trials, [](const MatchingTrial&) { return 0; });
  report.metric_name = "first_slot_baseline_accuracy";
  return report;
}

}  // namespace toolsel::metrics

#pragma once

#include <functional>
#include <vector>

#include <json.hpp>

#include "toolsel/matching/similarity.hpp"
#include "toolsel/metrics/metrics.hpp"

namespace toolsel::metrics {

struct AblationRow {
  std::size_t removed_index = 0;
  EvaluationReport report;
  double delta = 0.0;  // value - baseline value
};

struct AblationTable {
  EvaluationReport baseline;
  std::vector<AblationRow> rows;  // registry order, one per attribute
};

using MaskedEvaluation = std::function<EvaluationReport(const matching::AblationMask&)>;

// Evaluates the empty mask, then each of the 13 single-attribute removals.
AblationTable ablation_sweep(const MaskedEvaluation& evaluate);

nlohmann::json to_json(const AblationTable& table);

}  // namespace toolsel::metrics

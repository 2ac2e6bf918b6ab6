#include "toolsel/metrics/ablation.hpp"

#include "toolsel/core/error.hpp"

namespace toolsel::metrics {

AblationTable ablation_sweep(const MaskedEvaluation& evaluate) {
  AblationTable table;
  table.baseline = evaluate(matching::AblationMask{});
  for (std::size_t i = 0; i < kAttributeCount; ++i) {
    AblationRow row;
    row.removed_index = i;
    try {
      row.report = evaluate(matching::AblationMask::removing(i));
    } catch (const Error& e) {
      throw Error("metrics", "ablation without " + std::string(attribute_name(i)) + ": " +
                                 e.what());
    }
    row.delta = row.report.value() - table.baseline.value();
    table.rows.push_back(std::move(row));
  }
  return table;
}

nlohmann::json to_json(const AblationTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"removed", attribute_name(row.removed_index)},
                    {"index", row.removed_index},
                    {"value", row.report.value()},
                    {"numerator", row.report.count.numerator},
                    {"denominator", row.report.count.denominator},
                    {"delta", row.delta}});
  }
  return {{"baseline", to_json(table.baseline)}, {"baseline_delta", 0.0}, {"rows", rows}};
}

}  // namespace toolsel::metrics

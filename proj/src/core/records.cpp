#include "toolsel/core/records.hpp"

#include <algorithm>

#include "toolsel/core/error.hpp"

namespace toolsel {

ToolCatalog::ToolCatalog(std::vector<ToolRecord> tools) : tools_(std::move(tools)) {
  if (tools_.empty()) throw InvalidArgument("core", "catalog is empty");
  for (std::size_t i = 0; i < tools_.size(); ++i) {
    if (i > 0 && tools_[i].tool_id <= tools_[i - 1].tool_id) {
      throw InvalidArgument("core", "tool ids not strictly increasing at tool_id " +
                                        std::to_string(tools_[i].tool_id));
    }
    const VectorCheck check = validate_attribute_vector(tools_[i].attributes, true);
    if (!check.ok()) {
      throw InvalidArgument("core", "tool_id " + std::to_string(tools_[i].tool_id) + ": " +
                                        check.describe());
    }
  }
}

const ToolRecord* ToolCatalog::find(ToolId id) const {
  auto it = std::lower_bound(tools_.begin(), tools_.end(), id,
                             [](const ToolRecord& t, ToolId v) { return t.tool_id < v; });
  if (it == tools_.end() || it->tool_id != id) return nullptr;
  return &*it;
}

bool ToolCatalog::contains(ToolId id) const { return find(id) != nullptr; }

const ToolRecord& ToolCatalog::at(ToolId id) const {
  const ToolRecord* t = find(id);
  if (t == nullptr) throw InvalidArgument("core", "unknown tool_id " + std::to_string(id));
  return *t;
}

std::string_view split_name(Split s) { return s == Split::train ? "train" : "test"; }

std::optional<Split> parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  return std::nullopt;
}

void validate_trial(const MatchingTrial& trial,
                    const std::function<ToolId(ItemId)>& scenario_tool,
                    const std::function<ToolId(ItemId)>& candidate_tool) {
  const std::string where = "trial " + std::to_string(trial.trial_id) + ": ";
  if (trial.target_position >= kTrialCandidates) {
    throw InvalidArgument("core", where + "target_position " +
                                      std::to_string(trial.target_position) + " not in [0,9]");
  }
  const ToolId truth = scenario_tool(trial.scenario_item_id);
  std::vector<ToolId> seen;
  for (std::size_t pos = 0; pos < kTrialCandidates; ++pos) {
    const ToolId tool = candidate_tool(trial.candidate_item_ids[pos]);
    if (pos == trial.target_position) {
      if (tool != truth) {
        throw InvalidArgument("core", where + "target item belongs to tool " +
                                          std::to_string(tool) + ", scenario to tool " +
                                          std::to_string(truth));
      }
    } else if (tool == truth) {
      throw InvalidArgument("core", where + "distractor at position " + std::to_string(pos) +
                                        " shares the target tool " + std::to_string(truth));
    }
    if (std::find(seen.begin(), seen.end(), tool) != seen.end()) {
      throw InvalidArgument("core", where + "duplicate candidate tool " + std::to_string(tool));
    }
    seen.push_back(tool);
  }
}

}  // namespace toolsel

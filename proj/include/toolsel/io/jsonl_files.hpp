#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolsel/core/records.hpp"

namespace toolsel::io {

// {"scenario_id", "tool_id", "text", "item_id"} per line.
std::string format_scenarios(std::span<const ScenarioRecord> scenarios);
std::vector<ScenarioRecord> parse_scenarios(std::string_view content);

// {"trial_id", "scenario_item_id", "candidate_item_ids": [10], "target_position"}.
std::string format_trials(std::span<const MatchingTrial> trials);
std::vector<MatchingTrial> parse_trials(std::string_view content);

void write_scenarios(std::span<const ScenarioRecord> scenarios, const std::filesystem::path& path);
std::vector<ScenarioRecord> read_scenarios(const std::filesystem::path& path,
                                           const ToolCatalog& catalog);

void write_trials(std::span<const MatchingTrial> trials, const std::filesystem::path& path);
std::vector<MatchingTrial> read_trials(const std::filesystem::path& path);

}  // namespace toolsel::io

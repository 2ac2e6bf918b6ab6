#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolsel/core/attributes.hpp"

namespace toolsel {

using ToolId = std::uint64_t;
using ItemId = std::uint64_t;

struct ToolRecord {
  ToolId tool_id = 0;
  std::string tool_name;  // display only
  AttributeVector attributes{};
};

// Tools sorted by strictly increasing id, each with a ground-truth vector.
class ToolCatalog {
 public:
  ToolCatalog() = default;
  // Validates ordering, uniqueness and the [1,7] bound.
  explicit ToolCatalog(std::vector<ToolRecord> tools);

  std::span<const ToolRecord> tools() const { return tools_; }
  std::size_t size() const { return tools_.size(); }

  bool contains(ToolId id) const;
  // Throws InvalidArgument naming the id if absent.
  const ToolRecord& at(ToolId id) const;
  const ToolRecord* find(ToolId id) const;

 private:
  std::vector<ToolRecord> tools_;
};

enum class Split { train, test };

std::string_view split_name(Split s);
std::optional<Split> parse_split(std::string_view s);

struct EmbeddingRecord {
  ItemId item_id = 0;
  ToolId tool_id = 0;
  Split split = Split::train;
  std::vector<double> embedding;
};

// The scenario's target attributes are inherited from its tool.
struct ScenarioRecord {
  std::uint64_t scenario_id = 0;
  ToolId tool_id = 0;
  std::string text;
  ItemId item_id = 0;  // embedding record of this scenario
};

inline constexpr std::size_t kTrialCandidates = 10;

struct MatchingTrial {
  std::uint64_t trial_id = 0;
  ItemId scenario_item_id = 0;
  std::array<ItemId, kTrialCandidates> candidate_item_ids{};
  std::size_t target_position = 0;

  ItemId target_item_id() const { return candidate_item_ids.at(target_position); }
};

// Checks the trial against item→tool lookups: target shares the scenario's
// tool, the nine distractors each belong to some other tool. Throws
// InvalidArgument on violation.
void validate_trial(const MatchingTrial& trial,
                    const std::function<ToolId(ItemId)>& scenario_tool,
                    const std::function<ToolId(ItemId)>& candidate_tool);

}  // namespace toolsel

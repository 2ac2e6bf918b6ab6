#include "toolsel/io/jsonl_files.hpp"

#include <set>

#include <json.hpp>

#include "toolsel/io/errors.hpp"
#include "toolsel/io/text.hpp"

namespace toolsel::io {

namespace {

nlohmann::json parse_line(const Line& line, const char* what) {
  try {
    nlohmann::json j = nlohmann::json::parse(line.text);
    if (!j.is_object()) throw FormatError("io", std::string(what) + " line " +
                                                    std::to_string(line.number) + ": not an object");
    return j;
  } catch (const nlohmann::json::parse_error&) {
    throw FormatError("io", std::string(what) + " line " + std::to_string(line.number) +
                                ": invalid JSON");
  }
}

template <typename T>
T get(const nlohmann::json& obj, const char* key, const Line& line, const char* what) {
  if (!obj.contains(key)) {
    throw FormatError("io", std::string(what) + " line " + std::to_string(line.number) +
                                ": missing '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("io", std::string(what) + " line " + std::to_string(line.number) +
                                ": bad '" + key + "'");
  }
}

}  // namespace

std::string format_scenarios(std::span<const ScenarioRecord> scenarios) {
  std::string out;
  for (const auto& s : scenarios) {
    nlohmann::ordered_json j;
    j["scenario_id"] = s.scenario_id;
    j["tool_id"] = s.tool_id;
    j["text"] = s.text;
    j["item_id"] = s.item_id;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<ScenarioRecord> parse_scenarios(std::string_view content) {
  std::vector<ScenarioRecord> out;
  std::set<std::uint64_t> ids;
  std::set<ItemId> items;
  for (const Line& line : split_lines(std::string(content))) {
    const auto j = parse_line(line, "scenario");
    ScenarioRecord s;
    s.scenario_id = get<std::uint64_t>(j, "scenario_id", line, "scenario");
    s.tool_id = get<ToolId>(j, "tool_id", line, "scenario");
    s.text = get<std::string>(j, "text", line, "scenario");
    s.item_id = get<ItemId>(j, "item_id", line, "scenario");
    if (!ids.insert(s.scenario_id).second) {
      throw FormatError("io", "duplicate scenario_id " + std::to_string(s.scenario_id));
    }
    if (!items.insert(s.item_id).second) {
      throw FormatError("io", "duplicate scenario item_id " + std::to_string(s.item_id));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_trials(std::span<const MatchingTrial> trials) {
  std::string out;
  for (const auto& t : trials) {
    nlohmann::ordered_json j;
    j["trial_id"] = t.trial_id;
    j["scenario_item_id"] = t.scenario_item_id;
    j["candidate_item_ids"] = t.candidate_item_ids;
    j["target_position"] = t.target_position;
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<MatchingTrial> parse_trials(std::string_view content) {
  std::vector<MatchingTrial> out;
  std::set<std::uint64_t> ids;
  for (const Line& line : split_lines(std::string(content))) {
    const auto j = parse_line(line, "trial");
    MatchingTrial t;
    t.trial_id = get<std::uint64_t>(j, "trial_id", line, "trial");
    t.scenario_item_id = get<ItemId>(j, "scenario_item_id", line, "trial");
    const auto candidates = get<std::vector<ItemId>>(j, "candidate_item_ids", line, "trial");
    if (candidates.size() != kTrialCandidates) {
      throw FormatError("io", "trial line " + std::to_string(line.number) + ": expected 10 candidates, found " +
                                  std::to_string(candidates.size()));
    }
    std::copy(candidates.begin(), candidates.end(), t.candidate_item_ids.begin());
    t.target_position = get<std::size_t>(j, "target_position", line, "trial");
    if (t.target_position >= kTrialCandidates) {
      throw FormatError("io", "trial line " + std::to_string(line.number) +
                                  ": target_position must lie in [0,9]");
    }
    if (!ids.insert(t.trial_id).second) {
      throw FormatError("io", "duplicate trial_id " + std::to_string(t.trial_id));
    }
    out.push_back(t);
  }
  return out;
}

void write_scenarios(std::span<const ScenarioRecord> scenarios, const std::filesystem::path& path) {
  write_file(path, format_scenarios(scenarios));
}

std::vector<ScenarioRecord> read_scenarios(const std::filesystem::path& path,
                                           const ToolCatalog& catalog) {
  auto scenarios = parse_scenarios(read_file(path));
  for (const auto& s : scenarios) {
    if (!catalog.contains(s.tool_id)) {
      throw FormatError("io", "scenario " + std::to_string(s.scenario_id) +
                                  " references unknown tool_id " + std::to_string(s.tool_id));
    }
  }
  return scenarios;
}

void write_trials(std::span<const MatchingTrial> trials, const std::filesystem::path& path) {
  write_file(path, format_trials(trials));
}

std::vector<MatchingTrial> read_trials(const std::filesystem::path& path) {
  return parse_trials(read_file(path));
}

}  // namespace toolsel::io

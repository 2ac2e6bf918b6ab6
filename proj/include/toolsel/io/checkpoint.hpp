#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "toolsel/encoders/train.hpp"

namespace toolsel::io {

inline constexpr int kCheckpointFormatVersion = 1;

// Parameters are stored as shortest round-trip decimal strings, weights
// row-major, so load(save(h)) reproduces every bit.
nlohmann::ordered_json checkpoint_to_json(const encoders::TrainedHead& trained);
encoders::TrainedHead checkpoint_from_json(const nlohmann::json& doc);

nlohmann::ordered_json config_to_json(const encoders::HeadConfig& config);

std::string format_checkpoint(const encoders::TrainedHead& trained);
encoders::TrainedHead parse_checkpoint(std::string_view content);

void save_checkpoint(const encoders::TrainedHead& trained, const std::filesystem::path& path);
encoders::TrainedHead load_checkpoint(const std::filesystem::path& path);

}  // namespace toolsel::io

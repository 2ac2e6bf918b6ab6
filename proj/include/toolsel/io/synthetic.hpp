#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toolsel/core/records.hpp"
#include "toolsel/nn/dense.hpp"

namespace toolsel::io {

enum class Preset { small, medium, large };

std::string_view preset_name(Preset p);
std::optional<Preset> parse_preset(std::string_view s);

struct PerToolCounts {
  std::size_t train = 0;
  std::size_t test = 0;
};

// small 10/3, medium 90/10, large 475/25 items per tool.
PerToolCounts preset_counts(Preset p);

struct SyntheticSpec {
  std::size_t n_tools = 115;
  PerToolCounts images_per_tool = preset_counts(Preset::small);
  PerToolCounts scenarios_per_tool = preset_counts(Preset::small);
  std::size_t visual_dim = 32;
  std::size_t language_dim = 32;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  // Images and scenarios both follow the preset.
  static SyntheticSpec from_preset(Preset preset, std::size_t n_tools, double sigma,
                                   std::uint64_t seed);
};

struct SyntheticDataset {
  ToolCatalog catalog;
  std::vector<EmbeddingRecord> visual;
  std::vector<EmbeddingRecord> scenario_embeddings;
  std::vector<ScenarioRecord> scenarios;
  std::vector<MatchingTrial> trials;
  nn::Matrix visual_mixing;    // d_v x 13, orthonormal columns
  nn::Matrix language_mixing;  // d_l x 13, orthonormal columns
};

// Attributes: integers 1..7, redrawn until catalog vectors are pairwise
// distinct. Embedding of an item of tool c: W a_c + sigma * xi, stored at
// f32 precision. Trials: one per tool for the first min(100, n_tools) tools,
// each a test scenario, a test image of the same tool and test images of 9
// distinct other tools in shuffled positions.
SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

// Seeded Gaussian matrix with orthonormalized columns (modified Gram-Schmidt).
nn::Matrix orthonormal_mixing(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              std::uint64_t stream);

struct DatasetPaths {
  std::filesystem::path catalog;
  std::filesystem::path visual_embeddings;
  std::filesystem::path visual_manifest;
  std::filesystem::path scenario_embeddings;
  std::filesystem::path scenario_manifest;
  std::filesystem::path scenarios;
  std::filesystem::path trials;

  static DatasetPaths in(const std::filesystem::path& dir);
};

void write_dataset(const SyntheticDataset& data, const DatasetPaths& paths);

}  // namespace toolsel::io

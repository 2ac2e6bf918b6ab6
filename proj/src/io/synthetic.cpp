#include "toolsel/io/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"
#include "toolsel/io/catalog_file.hpp"
#include "toolsel/io/embedding_file.hpp"
#include "toolsel/io/jsonl_files.hpp"

namespace toolsel::io {

namespace {

constexpr std::size_t kMaxTrials = 100;

void validate(const SyntheticSpec& spec) {
  if (spec.n_tools < kTrialCandidates) {
    throw InvalidArgument("io", "synthetic spec needs at least 10 tools for 10-candidate trials, got " +
                                    std::to_string(spec.n_tools));
  }
  if (spec.visual_dim < kAttributeCount || spec.language_dim < kAttributeCount) {
    throw InvalidArgument("io", "embedding dimensions must be at least 13 for an injective map");
  }
  if (spec.images_per_tool.test == 0 || spec.scenarios_per_tool.test == 0) {
    throw InvalidArgument("io", "trials need at least one test image and scenario per tool");
  }
  if (spec.images_per_tool.train == 0 || spec.scenarios_per_tool.train == 0) {
    throw InvalidArgument("io", "training needs at least one train item per tool");
  }
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw InvalidArgument("io", "noise_sigma must be finite and non-negative");
  }
}

ToolCatalog draw_catalog(const SyntheticSpec& spec) {
  Rng rng(spec.seed, streams::catalog);
  std::set<RatingVector> used;
  std::vector<ToolRecord> tools;
  for (std::size_t c = 0; c < spec.n_tools; ++c) {
    RatingVector r{};
    do {
      for (int& v : r) v = 1 + static_cast<int>(rng.uniform_index(7));
    } while (used.contains(r));
    used.insert(r);
    ToolRecord t;
    t.tool_id = c + 1;
    t.tool_name = "tool_" + std::to_string(c + 1);
    for (std::size_t i = 0; i < kAttributeCount; ++i) t.attributes[i] = r[i];
    tools.push_back(std::move(t));
  }
  return ToolCatalog(std::move(tools));
}

struct ItemBlock {
  std::vector<ItemId> train;
  std::vector<ItemId> test;
};

// Appends train then test items of every tool; returns per-tool item ids.
std::vector<ItemBlock> emit_items(const ToolCatalog& catalog, const nn::Matrix& mixing,
                                  PerToolCounts counts, double sigma, Rng& noise, ItemId& next_id,
                                  std::vector<EmbeddingRecord>& out) {
  std::vector<ItemBlock> blocks;
  const auto dim = static_cast<std::size_t>(mixing.rows());
  for (const ToolRecord& tool : catalog.tools()) {
    const Eigen::Map<const nn::Vector> a(tool.attributes.data(),
                                         static_cast<Eigen::Index>(kAttributeCount));
    const nn::Vector clean = mixing * a;
    ItemBlock block;
    for (const Split split : {Split::train, Split::test}) {
      const std::size_t n = split == Split::train ? counts.train : counts.test;
      for (std::size_t k = 0; k < n; ++k) {
        EmbeddingRecord r;
        r.item_id = next_id++;
        r.tool_id = tool.tool_id;
        r.split = split;
        r.embedding.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          r.embedding[i] = clean(static_cast<Eigen::Index>(i)) + sigma * noise.normal();
        }
        narrow_to_f32(r.embedding);
        (split == Split::train ? block.train : block.test).push_back(r.item_id);
        out.push_back(std::move(r));
      }
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

}  // namespace

std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::small:
      return "small";
    case Preset::medium:
      return "medium";
    case Preset::large:
      return "large";
  }
  return "small";
}

std::optional<Preset> parse_preset(std::string_view s) {
  if (s == "small") return Preset::small;
  if (s == "medium") return Preset::medium;
  if (s == "large") return Preset::large;
  return std::nullopt;
}

PerToolCounts preset_counts(Preset p) {
  switch (p) {
    case Preset::small:
      return {10, 3};
    case Preset::medium:
      return {90, 10};
    case Preset::large:
      return {475, 25};
  }
  return {10, 3};
}

SyntheticSpec SyntheticSpec::from_preset(Preset preset, std::size_t n_tools, double sigma,
                                         std::uint64_t seed) {
  SyntheticSpec s;
  s.n_tools = n_tools;
  s.images_per_tool = preset_counts(preset);
  s.scenarios_per_tool = preset_counts(preset);
  s.noise_sigma = sigma;
  s.seed = seed;
  return s;
}

nn::Matrix orthonormal_mixing(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              std::uint64_t stream) {
  if (rows < cols) throw InvalidArgument("io", "mixing matrix needs rows >= cols");
  Rng rng(seed, stream);
  nn::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
  }
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index p = 0; p < c; ++p) {
      double dot = 0.0;
      for (Eigen::Index r = 0; r < m.rows(); ++r) dot += m(r, p) * m(r, c);
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) -= dot * m(r, p);
    }
    double norm = 0.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) norm += m(r, c) * m(r, c);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw NumericError("io", "degenerate mixing matrix");
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) /= norm;
  }
  return m;
}

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  SyntheticDataset data;
  data.catalog = draw_catalog(spec);
  data.visual_mixing =
      orthonormal_mixing(spec.visual_dim, kAttributeCount, spec.seed, streams::visual_mixing);
  data.language_mixing =
      orthonormal_mixing(spec.language_dim, kAttributeCount, spec.seed, streams::language_mixing);

  ItemId next_id = 0;
  Rng visual_noise(spec.seed, streams::visual_noise);
  const auto visual_blocks = emit_items(data.catalog, data.visual_mixing, spec.images_per_tool,
                                        spec.noise_sigma, visual_noise, next_id, data.visual);
  Rng language_noise(spec.seed, streams::language_noise);
  const auto scenario_blocks =
      emit_items(data.catalog, data.language_mixing, spec.scenarios_per_tool, spec.noise_sigma,
                 language_noise, next_id, data.scenario_embeddings);

  std::uint64_t scenario_id = 0;
  for (const auto& r : data.scenario_embeddings) {
    data.scenarios.push_back({scenario_id++, r.tool_id,
                              "synthetic scenario for tool " + std::to_string(r.tool_id),
                              r.item_id});
  }

  Rng rng(spec.seed, streams::trials);
  const std::size_t n_trials = std::min(kMaxTrials, spec.n_tools);
  for (std::size_t c = 0; c < n_trials; ++c) {
    MatchingTrial trial;
    trial.trial_id = c;
    const auto& scen = scenario_blocks[c].test;
    trial.scenario_item_id = scen[rng.uniform_index(scen.size())];

    std::vector<std::size_t> others;
    for (std::size_t o = 0; o < spec.n_tools; ++o) {
      if (o != c) others.push_back(o);
    }
    // Partial Fisher-Yates: the first nine entries become the distractor tools.
    for (std::size_t k = 0; k + 1 < kTrialCandidates; ++k) {
      const auto j = k + static_cast<std::size_t>(rng.uniform_index(others.size() - k));
      std::swap(others[k], others[j]);
    }
    std::array<ItemId, kTrialCandidates> slots{};
    const auto& target_items = visual_blocks[c].test;
    slots[0] = target_items[rng.uniform_index(target_items.size())];
    for (std::size_t k = 0; k + 1 < kTrialCandidates; ++k) {
      const auto& items = visual_blocks[others[k]].test;
      slots[k + 1] = items[rng.uniform_index(items.size())];
    }
    const ItemId target = slots[0];
    rng.shuffle(std::span<ItemId>(slots));
    trial.candidate_item_ids = slots;
    trial.target_position = static_cast<std::size_t>(
        std::find(slots.begin(), slots.end(), target) - slots.begin());
    data.trials.push_back(trial);
  }
  return data;
}

DatasetPaths DatasetPaths::in(const std::filesystem::path& dir) {
  return {dir / "catalog.csv",          dir / "visual.femb",     dir / "visual.manifest.jsonl",
          dir / "scenario.femb",        dir / "scenario.manifest.jsonl",
          dir / "scenarios.jsonl",      dir / "trials.jsonl"};
}

void write_dataset(const SyntheticDataset& data, const DatasetPaths& paths) {
  write_catalog(data.catalog, paths.catalog);
  write_embeddings(data.visual, paths.visual_embeddings, paths.visual_manifest);
  write_embeddings(data.scenario_embeddings, paths.scenario_embeddings, paths.scenario_manifest);
  write_scenarios(data.scenarios, paths.scenarios);
  write_trials(data.trials, paths.trials);
}

}  // namespace toolsel::io

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "toolsel/core/records.hpp"
#include "toolsel/encoders/provider.hpp"
#include "toolsel/nn/dense.hpp"

namespace toolsel::encoders {

enum class Pathway { visual, language };

std::string_view pathway_name(Pathway p);
std::optional<Pathway> parse_pathway(std::string_view s);

// Disables early stopping.
inline constexpr std::size_t kNoPatience = std::numeric_limits<std::size_t>::max();

struct HeadConfig {
  Pathway pathway = Pathway::visual;
  std::vector<std::size_t> layer_dims;  // [d_in, hidden..., 13]
  double learning_rate = 1e-4;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  // visual: [d, 256, 64, 13], lr 1e-4, batch 256, 1000 epochs
  // language: [d, 256, 128, 64, 13], lr 5e-5, batch 4, 2000 epochs
  static HeadConfig defaults(Pathway pathway, std::size_t input_dim);
};

struct EpochLog {
  double train_mse = 0.0;  // sample-weighted mean of mini-batch losses
  double val_mse = 0.0;
};

struct TrainedHead {
  nn::MlpHead head;
  HeadConfig config;
  double best_validation_mse = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  std::size_t epochs_run = 0;
  std::vector<EpochLog> training_log;
};

struct ValidationSplit {
  std::vector<ItemId> fit;
  std::vector<ItemId> validation;
};

// Stratified by tool: each tool contributes round(fraction * count) items,
// always leaving at least one for fitting. With a single training item the
// validation set reuses it.
ValidationSplit split_validation(const EmbeddingProvider& provider,
                                 std::span<const ItemId> train_items, double fraction,
                                 std::uint64_t seed);

// Mini-batch Adam on MSE against catalog vectors, early stopping on
// validation MSE; returns the best-validation parameters.
TrainedHead train_head(const EmbeddingProvider& provider, const ToolCatalog& catalog,
                       const HeadConfig& config);

// Untrained head wrapped as a TrainedHead (max_epochs = 0 semantics).
TrainedHead untrained(const HeadConfig& config);

AttributeVector predict_attributes(const TrainedHead& trained, const EmbeddingProvider& provider,
                                   ItemId item);

using PredictionTable = std::map<ItemId, AttributeVector>;

PredictionTable predict_items(const nn::MlpHead& head, const EmbeddingProvider& provider,
                              std::span<const ItemId> items);

}  // namespace toolsel::encoders

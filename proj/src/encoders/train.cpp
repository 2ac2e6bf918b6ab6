#include "toolsel/encoders/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"
#include "toolsel/nn/adam.hpp"

namespace toolsel::encoders {

std::string_view pathway_name(Pathway p) { return p == Pathway::visual ? "visual" : "language"; }

std::optional<Pathway> parse_pathway(std::string_view s) {
  if (s == "visual") return Pathway::visual;
  if (s == "language") return Pathway::language;
  return std::nullopt;
}

HeadConfig HeadConfig::defaults(Pathway pathway, std::size_t input_dim) {
  HeadConfig c;
  c.pathway = pathway;
  if (pathway == Pathway::visual) {
    c.layer_dims = {input_dim, 256, 64, kAttributeCount};
    c.learning_rate = 1e-4;
    c.batch_size = 256;
    c.max_epochs = 1000;
  } else {
    c.layer_dims = {input_dim, 256, 128, 64, kAttributeCount};
    c.learning_rate = 5e-5;
    c.batch_size = 4;
    c.max_epochs = 2000;
  }
  return c;
}

ValidationSplit split_validation(const EmbeddingProvider& provider,
                                 std::span<const ItemId> train_items, double fraction,
                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("encoders", "validation_fraction must lie in (0,1)");
  }
  if (train_items.size() <= 1) {
    return {{train_items.begin(), train_items.end()}, {train_items.begin(), train_items.end()}};
  }

  std::map<ToolId, std::vector<ItemId>> by_tool;
  for (const ItemId id : train_items) by_tool[provider.tool_id(id)].push_back(id);

  Rng rng(seed, streams::validation);
  std::set<ItemId> held_out;
  for (auto& [tool, items] : by_tool) {
    rng.shuffle(std::span<ItemId>(items));
    const auto n = items.size();
    auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
    take = std::min(take, n - 1);
    held_out.insert(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(take));
  }
  if (held_out.empty()) {
    // Every tool group is too small; take one item from the largest group.
    auto largest = by_tool.begin();
    for (auto it = by_tool.begin(); it != by_tool.end(); ++it) {
      if (it->second.size() > largest->second.size()) largest = it;
    }
    held_out.insert(largest->second.front());
  }

  ValidationSplit split;
  for (const ItemId id : train_items) {
    (held_out.contains(id) ? split.validation : split.fit).push_back(id);
  }
  return split;
}

namespace {

struct Batch {
  nn::Matrix inputs;
  nn::Matrix targets;
};

Batch gather(const EmbeddingProvider& provider, const ToolCatalog& catalog,
             std::span<const ItemId> items) {
  Batch b{nn::Matrix(static_cast<Eigen::Index>(provider.dim()),
                     static_cast<Eigen::Index>(items.size())),
          nn::Matrix(static_cast<Eigen::Index>(kAttributeCount),
                     static_cast<Eigen::Index>(items.size()))};
  for (std::size_t j = 0; j < items.size(); ++j) {
    const EmbeddingRecord& r = provider.record(items[j]);
    const auto col = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < r.embedding.size(); ++i) {
      b.inputs(static_cast<Eigen::Index>(i), col) = r.embedding[i];
    }
    const AttributeVector& t = catalog.at(r.tool_id).attributes;
    for (std::size_t i = 0; i < kAttributeCount; ++i) {
      b.targets(static_cast<Eigen::Index>(i), col) = t[i];
    }
  }
  return b;
}

void validate_config(const HeadConfig& config, std::size_t provider_dim) {
  nn::validate_layer_dims(config.layer_dims);
  if (config.layer_dims.front() != provider_dim) {
    throw InvalidArgument("encoders", "head input dimension " +
                                          std::to_string(config.layer_dims.front()) +
                                          " does not match embedding dimension " +
                                          std::to_string(provider_dim));
  }
  if (config.batch_size == 0) throw InvalidArgument("encoders", "batch_size must be positive");
  if (config.patience == 0) throw InvalidArgument("encoders", "patience must be positive");
}

}  // namespace

TrainedHead untrained(const HeadConfig& config) {
  TrainedHead t;
  t.head = nn::init_head(config.layer_dims, config.seed);
  t.config = config;
  return t;
}

TrainedHead train_head(const EmbeddingProvider& provider, const ToolCatalog& catalog,
                       const HeadConfig& config) {
  validate_config(config, provider.dim());
  const std::vector<ItemId> train_items = provider.items(Split::train);
  if (train_items.empty()) throw InvalidArgument("encoders", "training split is empty");

  TrainedHead result = untrained(config);
  if (config.max_epochs == 0) return result;

  const ValidationSplit split =
      split_validation(provider, train_items, config.validation_fraction, config.seed);
  const Batch fit = gather(provider, catalog, split.fit);
  const Batch val = gather(provider, catalog, split.validation);

  nn::MlpHead head = result.head;
  nn::AdamState adam(head, nn::AdamOptions{.learning_rate = config.learning_rate});
  Rng shuffle_rng(config.seed, streams::shuffle);

  std::vector<Eigen::Index> order(split.fit.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const auto n_fit = static_cast<Eigen::Index>(order.size());
  const auto batch_size = static_cast<Eigen::Index>(std::min<std::size_t>(config.batch_size, order.size()));

  nn::Matrix xb;
  nn::Matrix tb;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(std::span<Eigen::Index>(order));
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n_fit; start += batch_size) {
      const Eigen::Index bs = std::min(batch_size, n_fit - start);
      xb.resize(fit.inputs.rows(), bs);
      tb.resize(fit.targets.rows(), bs);
      for (Eigen::Index j = 0; j < bs; ++j) {
        xb.col(j) = fit.inputs.col(order[static_cast<std::size_t>(start + j)]);
        tb.col(j) = fit.targets.col(order[static_cast<std::size_t>(start + j)]);
      }
      nn::HeadGradients grads;
      try {
        grads = nn::head_backward(head, xb, tb);
      } catch (const NumericError& e) {
        throw NumericError("encoders", "training diverged at epoch " + std::to_string(epoch) +
                                           ": " + e.what());
      }
      loss_sum += grads.loss * static_cast<double>(bs);
      nn::adam_update(head, grads, adam);
    }

    EpochLog log;
    log.train_mse = loss_sum / static_cast<double>(n_fit);
    try {
      log.val_mse = nn::batch_mse(head, val.inputs, val.targets);
    } catch (const NumericError& e) {
      throw NumericError("encoders", "training diverged at epoch " + std::to_string(epoch) +
                                         ": " + e.what());
    }
    if (!std::isfinite(log.val_mse) || !std::isfinite(log.train_mse)) {
      throw NumericError("encoders", "training diverged at epoch " + std::to_string(epoch));
    }
    result.training_log.push_back(log);

    if (log.val_mse < result.best_validation_mse) {
      result.best_validation_mse = log.val_mse;
      result.best_epoch = epoch;
      result.head = head;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  result.epochs_run = result.training_log.size();
  return result;
}

AttributeVector predict_attributes(const TrainedHead& trained, const EmbeddingProvider& provider,
                                   ItemId item) {
  return nn::head_forward(trained.head, provider.embedding(item));
}

PredictionTable predict_items(const nn::MlpHead& head, const EmbeddingProvider& provider,
                              std::span<const ItemId> items) {
  PredictionTable table;
  for (const ItemId id : items) table.emplace(id, nn::head_forward(head, provider.embedding(id)));
  return table;
}

}  // namespace toolsel::encoders

#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "toolsel/core/records.hpp"

namespace toolsel::encoders {

// Frozen-backbone stand-in: a fixed map from item id to feature vector.
// Immutable after construction.
class EmbeddingProvider {
 public:
  EmbeddingProvider() = default;
  // Validates a uniform dimension, unique ids and finite values.
  explicit EmbeddingProvider(std::vector<EmbeddingRecord> records);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return records_.size(); }
  std::span<const EmbeddingRecord> records() const { return records_; }

  bool contains(ItemId id) const { return index_.contains(id); }
  // Each throws InvalidArgument naming the id when it is unknown.
  const EmbeddingRecord& record(ItemId id) const;
  std::span<const double> embedding(ItemId id) const { return record(id).embedding; }
  ToolId tool_id(ItemId id) const { return record(id).tool_id; }

  // Item ids of one split in storage order.
  std::vector<ItemId> items(Split split) const;

 private:
  std::size_t dim_ = 0;
  std::vector<EmbeddingRecord> records_;
  std::unordered_map<ItemId, std::size_t> index_;
};

}  // namespace toolsel::encoders

#include "toolsel/encoders/provider.hpp"

#include <cmath>
#include <string>

#include "toolsel/core/error.hpp"

namespace toolsel::encoders {

EmbeddingProvider::EmbeddingProvider(std::vector<EmbeddingRecord> records)
    : records_(std::move(records)) {
  if (!records_.empty()) dim_ = records_.front().embedding.size();
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const EmbeddingRecord& r = records_[i];
    if (r.embedding.size() != dim_) {
      throw InvalidArgument("encoders", "item " + std::to_string(r.item_id) + " has dimension " +
                                            std::to_string(r.embedding.size()) + ", expected " +
                                            std::to_string(dim_));
    }
    for (const double v : r.embedding) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("encoders",
                              "item " + std::to_string(r.item_id) + " has a non-finite value");
      }
    }
    if (!index_.emplace(r.item_id, i).second) {
      throw InvalidArgument("encoders", "duplicate item_id " + std::to_string(r.item_id));
    }
  }
}

const EmbeddingRecord& EmbeddingProvider::record(ItemId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) throw InvalidArgument("encoders", "unknown item_id " + std::to_string(id));
  return records_[it->second];
}

std::vector<ItemId> EmbeddingProvider::items(Split split) const {
  std::vector<ItemId> out;
  for (const auto& r : records_) {
    if (r.split == split) out.push_back(r.item_id);
  }
  return out;
}

}  // namespace toolsel::encoders

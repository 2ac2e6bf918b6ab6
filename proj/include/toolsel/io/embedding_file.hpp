#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "toolsel/core/records.hpp"
#include "toolsel/encoders/provider.hpp"

namespace toolsel::io {

// Binary layout, little-endian:
//   "FEMB" | u32 version = 1 | u32 dim | u64 count |
//   count x (u64 item_id, dim x f32)
// with a JSON Lines manifest {"item_id", "tool_id", "split"} per record.
inline constexpr std::uint32_t kEmbeddingFormatVersion = 1;
inline constexpr std::uint64_t kEmbeddingHeaderBytes = 20;

std::uint64_t embedding_file_size(std::uint32_t dim, std::uint64_t count);

// Values are narrowed to f32; writing then reading yields the f32-rounded
// values.
std::string encode_embeddings(std::span<const EmbeddingRecord> records);
std::string encode_manifest(std::span<const EmbeddingRecord> records);

encoders::EmbeddingProvider decode_embeddings(std::string_view bytes, std::string_view manifest,
                                              const std::string& source = "embeddings");

void write_embeddings(std::span<const EmbeddingRecord> records,
                      const std::filesystem::path& path,
                      const std::filesystem::path& manifest_path);

encoders::EmbeddingProvider read_embeddings(const std::filesystem::path& path,
                                            const std::filesystem::path& manifest_path);

// Rounds every value through f32 so in-memory records equal their on-disk form.
void narrow_to_f32(std::span<double> values);

// Throws FormatError when a record's tool_id is not in the catalog.
void check_tools(const encoders::EmbeddingProvider& provider, const ToolCatalog& catalog);

}  // namespace toolsel::io

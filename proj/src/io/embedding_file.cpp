#include "toolsel/io/embedding_file.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "toolsel/io/errors.hpp"
#include "toolsel/io/text.hpp"

namespace toolsel::io {

namespace {

constexpr char kMagic[4] = {'F', 'E', 'M', 'B'};

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename U>
U get_le(std::string_view bytes, std::uint64_t offset) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    value |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

struct ManifestEntry {
  ToolId tool_id;
  Split split;
};

template <typename T>
T field(const nlohmann::json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) {
    throw FormatError("io", "manifest line " + std::to_string(line) + ": missing '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("io", "manifest line " + std::to_string(line) + ": bad '" + key + "'");
  }
}

}  // namespace

std::uint64_t embedding_file_size(std::uint32_t dim, std::uint64_t count) {
  return kEmbeddingHeaderBytes + count * (8 + 4 * static_cast<std::uint64_t>(dim));
}

void narrow_to_f32(std::span<double> values) {
  for (double& v : values) v = static_cast<double>(static_cast<float>(v));
}

std::string encode_embeddings(std::span<const EmbeddingRecord> records) {
  const std::uint32_t dim =
      records.empty() ? 0 : static_cast<std::uint32_t>(records.front().embedding.size());
  std::unordered_set<ItemId> seen;
  std::string out;
  out.reserve(embedding_file_size(dim, records.size()));
  out.append(kMagic, 4);
  put_le<std::uint32_t>(out, kEmbeddingFormatVersion);
  put_le<std::uint32_t>(out, dim);
  put_le<std::uint64_t>(out, records.size());
  for (const EmbeddingRecord& r : records) {
    if (r.embedding.size() != dim) {
      throw InvalidArgument("io", "item " + std::to_string(r.item_id) + " has dimension " +
                                      std::to_string(r.embedding.size()) + ", expected " +
                                      std::to_string(dim));
    }
    if (!seen.insert(r.item_id).second) {
      throw InvalidArgument("io", "duplicate item_id " + std::to_string(r.item_id));
    }
    put_le<std::uint64_t>(out, r.item_id);
    for (const double v : r.embedding) {
      const auto f = static_cast<float>(v);
      if (!std::isfinite(f)) {
        throw InvalidArgument("io", "item " + std::to_string(r.item_id) +
                                        " has a value not representable as finite f32");
      }
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
    }
  }
  return out;
}

std::string encode_manifest(std::span<const EmbeddingRecord> records) {
  std::string out;
  for (const EmbeddingRecord& r : records) {
    nlohmann::ordered_json j;
    j["item_id"] = r.item_id;
    j["tool_id"] = r.tool_id;
    j["split"] = split_name(r.split);
    out += j.dump() + "\n";
  }
  return out;
}

encoders::EmbeddingProvider decode_embeddings(std::string_view bytes, std::string_view manifest,
                                              const std::string& source) {
  if (bytes.size() < kEmbeddingHeaderBytes) {
    throw TruncatedFile(source, kEmbeddingHeaderBytes, bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("io", source + ": bad magic, expected FEMB");
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kEmbeddingFormatVersion) {
    throw FormatError("io", source + ": unsupported version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(bytes, 8);
  const auto count = get_le<std::uint64_t>(bytes, 12);
  const std::uint64_t record_bytes = 8 + 4 * static_cast<std::uint64_t>(dim);
  if (count > (bytes.size() - kEmbeddingHeaderBytes) / record_bytes + 1) {
    // count alone implies more data than any plausible file; avoid overflow.
    throw TruncatedFile(source, kEmbeddingHeaderBytes + count * record_bytes, bytes.size());
  }
  const std::uint64_t expected = embedding_file_size(dim, count);
  if (bytes.size() != expected) throw TruncatedFile(source, expected, bytes.size());

  std::unordered_map<ItemId, ManifestEntry> entries;
  for (const Line& line : split_lines(std::string(manifest))) {
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line.text);
    } catch (const nlohmann::json::parse_error&) {
      throw FormatError("io", "manifest line " + std::to_string(line.number) + ": invalid JSON");
    }
    const auto id = field<ItemId>(obj, "item_id", line.number);
    const auto tool = field<ToolId>(obj, "tool_id", line.number);
    const auto split = parse_split(field<std::string>(obj, "split", line.number));
    if (!split) {
      throw FormatError("io", "manifest line " + std::to_string(line.number) +
                                  ": split must be train or test");
    }
    if (!entries.emplace(id, ManifestEntry{tool, *split}).second) {
      throw FormatError("io", "manifest: duplicate item_id " + std::to_string(id));
    }
  }

  std::vector<EmbeddingRecord> records;
  records.reserve(count);
  std::uint64_t offset = kEmbeddingHeaderBytes;
  for (std::uint64_t n = 0; n < count; ++n) {
    EmbeddingRecord r;
    r.item_id = get_le<std::uint64_t>(bytes, offset);
    offset += 8;
    r.embedding.resize(dim);
    for (std::uint32_t i = 0; i < dim; ++i) {
      const float f = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
      offset += 4;
      if (!std::isfinite(f)) {
        throw FormatError("io", source + ": non-finite value in item " + std::to_string(r.item_id));
      }
      r.embedding[i] = static_cast<double>(f);
    }
    const auto it = entries.find(r.item_id);
    if (it == entries.end()) throw UnknownItem(source + " item missing from manifest", r.item_id);
    r.tool_id = it->second.tool_id;
    r.split = it->second.split;
    records.push_back(std::move(r));
  }
  if (entries.size() != records.size()) {
    std::unordered_set<ItemId> present;
    for (const auto& r : records) present.insert(r.item_id);
    for (const auto& line : split_lines(std::string(manifest))) {
      const auto id = nlohmann::json::parse(line.text).at("item_id").get<ItemId>();
      if (!present.contains(id)) throw UnknownItem("manifest references item not in " + source, id);
    }
  }
  try {
    return encoders::EmbeddingProvider(std::move(records));
  } catch (const InvalidArgument& e) {
    throw FormatError("io", source + ": " + e.what());
  }
}

void write_embeddings(std::span<const EmbeddingRecord> records, const std::filesystem::path& path,
                      const std::filesystem::path& manifest_path) {
  const std::string bytes = encode_embeddings(records);
  write_file(path, bytes);
  write_file(manifest_path, encode_manifest(records));
}

encoders::EmbeddingProvider read_embeddings(const std::filesystem::path& path,
                                            const std::filesystem::path& manifest_path) {
  return decode_embeddings(read_file(path), read_file(manifest_path), path.string());
}

void check_tools(const encoders::EmbeddingProvider& provider, const ToolCatalog& catalog) {
  for (const auto& r : provider.records()) {
    if (!catalog.contains(r.tool_id)) {
      throw FormatError("io", "item " + std::to_string(r.item_id) + " references tool_id " +
                                  std::to_string(r.tool_id) + " absent from the catalog");
    }
  }
}

}  // namespace toolsel::io

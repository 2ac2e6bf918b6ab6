#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"
#include "toolsel/encoders/train.hpp"
#include "toolsel/io/catalog_file.hpp"
#include "toolsel/io/checkpoint.hpp"
#include "toolsel/io/embedding_file.hpp"
#include "toolsel/io/errors.hpp"
#include "toolsel/io/jsonl_files.hpp"
#include "toolsel/io/synthetic.hpp"
#include "toolsel/io/text.hpp"

using namespace toolsel;
using namespace toolsel::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("toolsel_test_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string row(const std::string& id, const std::string& name, const std::string& fill,
                int odd_column = -1, const std::string& odd = "") {
  std::string s = id + "," + name;
  for (int i = 0; i < 13; ++i) s += "," + (i == odd_column ? odd : fill);
  return s + "\n";
}

std::vector<EmbeddingRecord> two_records() {
  return {{5, 1, Split::train, {0.1, -2.5, 3.0, 1e-3}}, {9, 2, Split::test, {4.0, 0.0, -0.0, 1e6}}};
}

}  // namespace

TEST_CASE("decimal text") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(!parse_double("1.5x"));
  CHECK(!parse_double(""));
  CHECK(parse_u64("42") == 42u);
  CHECK(!parse_u64("-1"));
}

TEST_CASE("catalog parse") {
  const std::string header = catalog_header() + "\n";
  CHECK(header.starts_with("tool_id,tool_name,elongation,spiky,size,smoothness,texturedness,hardness,"
                           "graspability,hand_relatedness,force_requirement,body_extension,"
                           "threatness,valence,arousal\n"));

  const LoadedCatalog two = parse_catalog(header + row("1", "hammer", "3.5") + row("2", "\"saw, hand\"", "7", 3, "1.25"));
  CHECK(two.catalog.size() == 2);
  CHECK(two.catalog.at(1).attributes[0] == 3.5);
  CHECK(two.catalog.at(2).attributes[3] == 1.25);
  CHECK(two.catalog.at(2).tool_name == "saw, hand");
  CHECK(two.rounded.at(1)[0] == 4);
  CHECK(two.rounded.at(2)[3] == 1);

  const LoadedCatalog again = parse_catalog(format_catalog(two.catalog));
  CHECK(again.catalog.at(2).tool_name == "saw, hand");
  CHECK(again.catalog.at(1).attributes == two.catalog.at(1).attributes);

  std::string swapped = catalog_header();
  swapped.replace(swapped.find("spiky,size"), 10, "size,spiky");
  try {
    parse_catalog(swapped + "\n" + row("1", "a", "3"));
    FAIL("expected HeaderMismatch");
  } catch (const HeaderMismatch& e) {
    CHECK(e.column() == 3);
    CHECK(e.expected() == "spiky");
    CHECK(e.found() == "size");
  }

  try {
    parse_catalog(header + row("1", "a", "3") + row("2", "b", "3", 4, "7.3"));
    FAIL("expected ValueOutOfRange");
  } catch (const ValueOutOfRange& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == "texturedness");
    CHECK(e.value() == "7.3");
    CHECK(std::string(e.what()).find("[1,7]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_catalog(header + row("1", "a", "3", 0, "nan")), ValueOutOfRange);
  CHECK_THROWS_AS(parse_catalog(header + row("1", "a", "3", 0, "0.99")), ValueOutOfRange);
  CHECK_THROWS_AS(parse_catalog(header + row("1", "a", "3") + row("1", "b", "3")), FormatError);
  CHECK_THROWS_AS(parse_catalog(header + row("2", "a", "3") + row("1", "b", "3")), FormatError);
  CHECK_THROWS_AS(parse_catalog(header), FormatError);
  CHECK_THROWS_AS(parse_catalog(catalog_header() + ",extra\n" + row("1", "a", "3")), HeaderMismatch);
}

TEST_CASE("embedding file layout") {
  const auto recs = two_records();
  const std::vector<EmbeddingRecord> empty;
  const std::string header_only = encode_embeddings(empty);
  CHECK(header_only.size() == 20);
  CHECK(header_only.substr(0, 4) == "FEMB");

  const std::string bytes = encode_embeddings(recs);
  CHECK(bytes.size() == 68);
  CHECK(embedding_file_size(4, 2) == 68);
  CHECK(bytes == encode_embeddings(recs));
  std::uint32_t version;
  std::memcpy(&version, bytes.data() + 4, 4);
  CHECK(version == 1);
  std::uint64_t first_id;
  std::memcpy(&first_id, bytes.data() + 20, 8);
  CHECK(first_id == 5);

  const std::string manifest = encode_manifest(recs);
  const auto p = decode_embeddings(bytes, manifest);
  CHECK(p.size() == 2);
  CHECK(p.tool_id(9) == 2);
  CHECK(p.record(9).split == Split::test);
  for (const auto& r : recs) {
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(p.embedding(r.item_id)[i] == static_cast<double>(static_cast<float>(r.embedding[i])));
    }
  }

  for (std::size_t len : {67u, 69u}) {
    std::string cut = bytes;
    cut.resize(len, '\0');
    try {
      decode_embeddings(cut, manifest);
      FAIL("expected TruncatedFile");
    } catch (const TruncatedFile& e) {
      CHECK(e.expected_bytes() == 68);
      CHECK(e.actual_bytes() == len);
    }
  }
  CHECK_THROWS_AS(decode_embeddings(bytes.substr(0, 10), manifest), TruncatedFile);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_embeddings(bad_magic, manifest), FormatError);
  std::string bad_version = bytes;
  bad_version[4] = 2;
  CHECK_THROWS_AS(decode_embeddings(bad_version, manifest), FormatError);

  std::string nan_value = bytes;
  const auto nan_bits = std::bit_cast<std::uint32_t>(std::numeric_limits<float>::quiet_NaN());
  std::memcpy(nan_value.data() + 28, &nan_bits, 4);
  CHECK_THROWS_AS(decode_embeddings(nan_value, manifest), FormatError);

  const std::string extra = manifest + "{\"item_id\":77,\"tool_id\":1,\"split\":\"train\"}\n";
  try {
    decode_embeddings(bytes, extra);
    FAIL("expected UnknownItem");
  } catch (const UnknownItem& e) {
    CHECK(e.item_id() == 77);
    CHECK(std::string(e.what()).find("77") != std::string::npos);
  }
  std::vector<EmbeddingRecord> only_first{recs[0]};
  CHECK_THROWS_AS(decode_embeddings(bytes, encode_manifest(only_first)), UnknownItem);

  auto ragged = recs;
  ragged[1].embedding.pop_back();
  CHECK_THROWS(encode_embeddings(ragged));
  auto dup = recs;
  dup[1].item_id = 5;
  CHECK_THROWS(encode_embeddings(dup));
}

TEST_CASE("embedding files on disk") {
  const fs::path dir = scratch("emb");
  const auto recs = two_records();
  write_embeddings(recs, dir / "e.femb", dir / "e.jsonl");
  const auto p = read_embeddings(dir / "e.femb", dir / "e.jsonl");
  write_embeddings(std::vector<EmbeddingRecord>(p.records().begin(), p.records().end()), dir / "f.femb",
                   dir / "f.jsonl");
  CHECK(read_file(dir / "e.femb") == read_file(dir / "f.femb"));
  CHECK(fs::file_size(dir / "e.femb") == 68);
  fs::remove_all(dir);
}

TEST_CASE("scenarios and trials") {
  std::vector<ScenarioRecord> s{{1, 3, "synthetic scenario for tool 3", 40}, {2, 4, "quote \" and\nnewline", 41}};
  const auto back = parse_scenarios(format_scenarios(s));
  REQUIRE(back.size() == 2);
  CHECK(back[1].text == s[1].text);
  CHECK(back[0].item_id == 40);

  MatchingTrial t;
  t.trial_id = 7;
  t.scenario_item_id = 40;
  for (std::size_t i = 0; i < 10; ++i) t.candidate_item_ids[i] = 100 + i;
  t.target_position = 6;
  const std::vector<MatchingTrial> ts{t};
  const auto tb = parse_trials(format_trials(ts));
  REQUIRE(tb.size() == 1);
  CHECK(tb[0].candidate_item_ids == t.candidate_item_ids);
  CHECK(tb[0].target_position == 6);

  CHECK_THROWS_AS(parse_trials("{\"trial_id\":1,\"scenario_item_id\":2,\"candidate_item_ids\":[1,2,3],\"target_position\":0}\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_trials("{\"trial_id\":1,\"scenario_item_id\":2,\"candidate_item_ids\":[1,2,3,4,5,6,7,8,9,10],\"target_position\":10}\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_scenarios("{not json}\n"), FormatError);
}

TEST_CASE("checkpoint round trip") {
  encoders::HeadConfig c = encoders::HeadConfig::defaults(encoders::Pathway::language, 6);
  c.seed = 21;
  encoders::TrainedHead t = encoders::untrained(c);
  Rng rng(21, 5);
  for (auto block : nn::parameter_blocks(t.head)) {
    for (double& v : block) v = rng.normal() * 1e-3 + 1.0 / 3.0;
  }
  t.best_validation_mse = 0.123456789012345678;
  t.best_epoch = 3;
  t.epochs_run = 4;
  t.training_log = {{1.5, 1.25}, {0.9, 0.8}, {0.4, 0.3}, {0.35, 0.31}};

  const encoders::TrainedHead back = parse_checkpoint(format_checkpoint(t));
  const auto a = nn::parameter_blocks(t.head);
  const auto b = nn::parameter_blocks(back.head);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].size() == b[i].size());
    CHECK(std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) == 0);
  }
  CHECK(back.config.learning_rate == 5e-5);
  CHECK(back.config.layer_dims == t.config.layer_dims);
  CHECK(back.best_validation_mse == t.best_validation_mse);
  CHECK(back.training_log.size() == 4);
  CHECK(back.training_log[2].val_mse == 0.3);
  CHECK(format_checkpoint(back) == format_checkpoint(t));

  const std::vector<double> x{0.3, -1.2, 2.0, 0.0, 5.5, -0.25};
  CHECK(nn::head_forward(back.head, x) == nn::head_forward(t.head, x));

  encoders::TrainedHead none = t;
  none.config.patience = encoders::kNoPatience;
  CHECK(parse_checkpoint(format_checkpoint(none)).config.patience == encoders::kNoPatience);

  auto doc = nlohmann::json::parse(format_checkpoint(t));
  doc["parameters"][1]["bias"].erase(0);
  try {
    checkpoint_from_json(doc);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(e.layer() == 1);
  }
  auto wrong_version = nlohmann::json::parse(format_checkpoint(t));
  wrong_version["format_version"] = 2;
  CHECK_THROWS_AS(checkpoint_from_json(wrong_version), FormatError);
  auto wrong_dims = nlohmann::json::parse(format_checkpoint(t));
  wrong_dims["layer_dims"][1] = 255;
  CHECK_THROWS_AS(checkpoint_from_json(wrong_dims), FormatError);
}

TEST_CASE("synthetic generator") {
  const SyntheticSpec spec = SyntheticSpec::from_preset(Preset::small, 12, 0.0, 4);
  const SyntheticDataset d = generate_synthetic(spec);
  CHECK(d.catalog.size() == 12);
  CHECK(d.visual.size() == 12 * 13);
  CHECK(d.scenarios.size() == 12 * 13);
  CHECK(d.trials.size() == 12);

  // Integer attributes, pairwise distinct.
  for (std::size_t i = 0; i < 12; ++i) {
    const auto& a = d.catalog.tools()[i].attributes;
    for (double v : a) CHECK(v == std::floor(v));
    for (std::size_t j = i + 1; j < 12; ++j) CHECK(a != d.catalog.tools()[j].attributes);
  }

  // Orthonormal mixing and the noiseless map.
  const nn::Matrix gram = d.visual_mixing.transpose() * d.visual_mixing;
  CHECK((gram - nn::Matrix::Identity(13, 13)).cwiseAbs().maxCoeff() < 1e-12);
  for (const EmbeddingRecord& r : d.visual) {
    const auto& a = d.catalog.at(r.tool_id).attributes;
    const nn::Vector e = d.visual_mixing * Eigen::Map<const nn::Vector>(a.data(), 13);
    for (std::size_t i = 0; i < r.embedding.size(); ++i) {
      CHECK(r.embedding[i] == static_cast<double>(static_cast<float>(e(static_cast<Eigen::Index>(i)))));
    }
  }

  // Trials: target of the scenario's tool, distractors from distinct other tools.
  const encoders::EmbeddingProvider vis(d.visual);
  const encoders::EmbeddingProvider scen(d.scenario_embeddings);
  for (const MatchingTrial& t : d.trials) {
    CHECK_NOTHROW(validate_trial(
        t, [&](ItemId id) { return scen.tool_id(id); }, [&](ItemId id) { return vis.tool_id(id); }));
    CHECK(scen.record(t.scenario_item_id).split == Split::test);
    for (ItemId id : t.candidate_item_ids) CHECK(vis.record(id).split == Split::test);
  }

  const SyntheticDataset again = generate_synthetic(spec);
  CHECK(encode_embeddings(again.visual) == encode_embeddings(d.visual));
  CHECK(encode_embeddings(again.scenario_embeddings) == encode_embeddings(d.scenario_embeddings));
  CHECK(format_trials(again.trials) == format_trials(d.trials));
  CHECK(format_catalog(again.catalog) == format_catalog(d.catalog));
  CHECK(format_scenarios(again.scenarios) == format_scenarios(d.scenarios));

  const SyntheticDataset other = generate_synthetic(SyntheticSpec::from_preset(Preset::small, 12, 0.0, 5));
  CHECK(format_catalog(other.catalog) != format_catalog(d.catalog));

  CHECK_THROWS_AS(generate_synthetic(SyntheticSpec::from_preset(Preset::small, 9, 0.0, 1)), InvalidArgument);
  SyntheticSpec thin = spec;
  thin.visual_dim = 12;
  CHECK_THROWS_AS(generate_synthetic(thin), InvalidArgument);
}

TEST_CASE("synthetic noise has the requested scale") {
  const SyntheticDataset d = generate_synthetic(SyntheticSpec::from_preset(Preset::medium, 10, 0.5, 2));
  double sq = 0;
  std::size_t n = 0;
  for (const EmbeddingRecord& r : d.scenario_embeddings) {
    const auto& a = d.catalog.at(r.tool_id).attributes;
    const nn::Vector e = d.language_mixing * Eigen::Map<const nn::Vector>(a.data(), 13);
    for (std::size_t i = 0; i < r.embedding.size(); ++i) {
      const double diff = r.embedding[i] - e(static_cast<Eigen::Index>(i));
      sq += diff * diff;
      ++n;
    }
  }
  CHECK(std::sqrt(sq / static_cast<double>(n)) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("preset sizes") {
  CHECK(preset_counts(Preset::small).train == 10);
  CHECK(preset_counts(Preset::small).test == 3);
  CHECK(preset_counts(Preset::medium).train == 90);
  CHECK(preset_counts(Preset::medium).test == 10);
  CHECK(preset_counts(Preset::large).train == 475);
  CHECK(preset_counts(Preset::large).test == 25);

  const SyntheticDataset d = generate_synthetic(SyntheticSpec::from_preset(Preset::large, 115, 0.3, 7));
  std::size_t train = 0, test = 0;
  for (const EmbeddingRecord& r : d.scenario_embeddings) (r.split == Split::train ? train : test)++;
  CHECK(train == 475 * 115);
  CHECK(test == 25 * 115);
  CHECK(d.scenarios.size() == 500 * 115);
  CHECK(d.trials.size() == 100);
}

TEST_CASE("dataset on disk") {
  const fs::path dir = scratch("data");
  const SyntheticDataset d = generate_synthetic(SyntheticSpec::from_preset(Preset::small, 10, 0.1, 3));
  const DatasetPaths paths = DatasetPaths::in(dir);
  write_dataset(d, paths);
  const LoadedCatalog cat = load_catalog(paths.catalog);
  CHECK(format_catalog(cat.catalog) == format_catalog(d.catalog));
  const auto vis = read_embeddings(paths.visual_embeddings, paths.visual_manifest);
  CHECK_NOTHROW(check_tools(vis, cat.catalog));
  CHECK(vis.size() == d.visual.size());
  CHECK(read_trials(paths.trials).size() == d.trials.size());
  CHECK(read_scenarios(paths.scenarios, cat.catalog).size() == d.scenarios.size());
  fs::remove_all(dir);
}

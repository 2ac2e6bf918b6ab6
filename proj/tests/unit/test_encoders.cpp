#include <cmath>
#include <vector>

#include "doctest.h"
#include "toolsel/core/error.hpp"
#include "toolsel/encoders/provider.hpp"
#include "toolsel/encoders/train.hpp"
#include "toolsel/io/synthetic.hpp"
#include "toolsel/nn/dense.hpp"

using namespace toolsel;
using namespace toolsel::encoders;

namespace {

io::SyntheticDataset small_data(double sigma, std::size_t tools = 20, std::uint64_t seed = 1) {
  return io::generate_synthetic(io::SyntheticSpec::from_preset(io::Preset::small, tools, sigma, seed));
}

HeadConfig fast_visual(std::size_t d) {
  HeadConfig c = HeadConfig::defaults(Pathway::visual, d);
  c.learning_rate = 1e-3;
  c.batch_size = 32;
  c.max_epochs = 200;
  return c;
}

}  // namespace

TEST_CASE("provider validation") {
  std::vector<EmbeddingRecord> r{{1, 1, Split::train, {0.0, 1.0}}, {2, 1, Split::test, {2.0, 3.0}}};
  const EmbeddingProvider p(r);
  CHECK(p.dim() == 2);
  CHECK(p.size() == 2);
  CHECK(p.items(Split::test) == std::vector<ItemId>{2});
  CHECK(p.embedding(2)[1] == 3.0);
  CHECK(p.tool_id(1) == 1);
  CHECK_THROWS_AS(p.record(3), InvalidArgument);

  auto dup = r;
  dup[1].item_id = 1;
  CHECK_THROWS_AS(EmbeddingProvider{dup}, InvalidArgument);
  auto ragged = r;
  ragged[1].embedding.push_back(1.0);
  CHECK_THROWS_AS(EmbeddingProvider{ragged}, InvalidArgument);
  auto nan = r;
  nan[0].embedding[0] = std::nan("");
  CHECK_THROWS_AS(EmbeddingProvider{nan}, InvalidArgument);
}

TEST_CASE("pathway defaults") {
  const HeadConfig v = HeadConfig::defaults(Pathway::visual, 512);
  CHECK(v.layer_dims == std::vector<std::size_t>{512, 256, 64, 13});
  CHECK(v.learning_rate == 1e-4);
  CHECK(v.batch_size == 256);
  CHECK(v.max_epochs == 1000);
  const HeadConfig l = HeadConfig::defaults(Pathway::language, 768);
  CHECK(l.layer_dims == std::vector<std::size_t>{768, 256, 128, 64, 13});
  CHECK(l.learning_rate == 5e-5);
  CHECK(l.batch_size == 4);
  CHECK(l.max_epochs == 2000);
  CHECK(parse_pathway("language") == Pathway::language);
  CHECK(!parse_pathway("audio"));
}

TEST_CASE("validation split") {
  const auto data = small_data(0.1);
  const EmbeddingProvider p(data.visual);
  const auto train = p.items(Split::train);
  const ValidationSplit s = split_validation(p, train, 0.1, 3);
  CHECK(s.fit.size() + s.validation.size() == train.size());
  CHECK(s.validation.size() == 20);  // one of ten per tool
  std::map<ToolId, int> per_tool;
  for (ItemId id : s.validation) ++per_tool[p.tool_id(id)];
  for (auto& [tool, n] : per_tool) CHECK(n == 1);
  const ValidationSplit again = split_validation(p, train, 0.1, 3);
  CHECK(again.validation == s.validation);

  const std::vector<ItemId> one{train.front()};
  const ValidationSplit single = split_validation(p, one, 0.1, 3);
  CHECK(single.fit == one);
  CHECK(single.validation == one);
  CHECK_THROWS_AS(split_validation(p, train, 0.0, 3), InvalidArgument);
}

TEST_CASE("zero epochs returns the initialized head") {
  const auto data = small_data(0.0);
  const EmbeddingProvider p(data.visual);
  HeadConfig c = fast_visual(p.dim());
  c.max_epochs = 0;
  c.seed = 4;
  const TrainedHead t = train_head(p, data.catalog, c);
  CHECK(t.training_log.empty());
  CHECK(t.epochs_run == 0);
  const nn::MlpHead init = nn::init_head(c.layer_dims, 4);
  for (std::size_t l = 0; l < init.layers.size(); ++l) {
    CHECK(t.head.layers[l].weights == init.layers[l].weights);
  }
}

TEST_CASE("training is deterministic") {
  const auto data = small_data(0.2, 12);
  const EmbeddingProvider p(data.visual);
  HeadConfig c = fast_visual(p.dim());
  c.max_epochs = 15;
  c.seed = 9;
  const TrainedHead a = train_head(p, data.catalog, c);
  const TrainedHead b = train_head(p, data.catalog, c);
  CHECK(a.best_validation_mse == b.best_validation_mse);
  CHECK(a.training_log.size() == b.training_log.size());
  for (std::size_t l = 0; l < a.head.layers.size(); ++l) {
    CHECK(a.head.layers[l].weights == b.head.layers[l].weights);
    CHECK(a.head.layers[l].bias == b.head.layers[l].bias);
  }
  c.seed = 10;
  const TrainedHead other = train_head(p, data.catalog, c);
  CHECK(other.head.layers[0].weights != a.head.layers[0].weights);
}

TEST_CASE("early stopping rule") {
  const auto data = small_data(0.8, 12);
  const EmbeddingProvider p(data.visual);
  HeadConfig c = fast_visual(p.dim());
  c.learning_rate = 1e-2;
  c.max_epochs = 500;
  c.patience = 5;
  c.seed = 2;
  const TrainedHead t = train_head(p, data.catalog, c);
  REQUIRE(t.epochs_run < c.max_epochs);
  CHECK(t.epochs_run == t.best_epoch + 5);
  double best = std::numeric_limits<double>::infinity();
  for (const EpochLog& e : t.training_log) best = std::min(best, e.val_mse);
  CHECK(best == t.best_validation_mse);
  CHECK(t.training_log[t.best_epoch - 1].val_mse == best);
}

TEST_CASE("noiseless data is recovered") {
  const auto data = small_data(0.0);
  const EmbeddingProvider p(data.visual);
  HeadConfig c = fast_visual(p.dim());
  c.seed = 1;
  const TrainedHead t = train_head(p, data.catalog, c);
  CHECK(t.epochs_run <= 200);
  CHECK(t.best_validation_mse < 0.01);
}

TEST_CASE("prediction semantics") {
  const auto data = small_data(0.0);
  const EmbeddingProvider p(data.visual);
  const ItemId item = p.items(Split::test).front();

  TrainedHead zeroed = untrained(fast_visual(p.dim()));
  zeroed.head.layers.back().weights.setZero();
  for (double v : predict_attributes(zeroed, p, item)) CHECK(v == 0.0);

  const TrainedHead t = untrained(fast_visual(p.dim()));
  CHECK(predict_attributes(t, p, item) == predict_attributes(t, p, item));

  // Inverse of the noiseless generator: W has orthonormal columns, so W^T e = a.
  TrainedHead oracle;
  oracle.head = nn::init_head({p.dim(), 13}, 0);
  oracle.head.layers[0].weights = data.visual_mixing.transpose();
  oracle.head.layers[0].bias.setZero();
  const auto preds = predict_items(oracle.head, p, p.items(Split::test));
  for (const auto& [id, pred] : preds) {
    const AttributeVector& truth = data.catalog.at(p.tool_id(id)).attributes;
    for (std::size_t i = 0; i < 13; ++i) {
      CHECK(std::abs(pred[i] - truth[i]) < 1e-5);
      CHECK(std::floor(pred[i] + 0.5) == truth[i]);
    }
  }
}

TEST_CASE("config errors") {
  const auto data = small_data(0.0, 10);
  const EmbeddingProvider p(data.visual);
  HeadConfig c = fast_visual(p.dim() + 1);
  CHECK_THROWS_AS(train_head(p, data.catalog, c), InvalidArgument);
  c = fast_visual(p.dim());
  c.batch_size = 0;
  CHECK_THROWS_AS(train_head(p, data.catalog, c), InvalidArgument);
}

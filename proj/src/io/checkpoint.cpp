#include "toolsel/io/checkpoint.hpp"

#include <cmath>

#include "toolsel/io/errors.hpp"
#include "toolsel/io/text.hpp"

namespace toolsel::io {

namespace {

using ordered = nlohmann::ordered_json;

ordered strings_of(const double* data, Eigen::Index n) {
  ordered arr = ordered::array();
  for (Eigen::Index i = 0; i < n; ++i) arr.push_back(format_double(data[i]));
  return arr;
}

ordered row_major(const nn::Matrix& m) {
  ordered arr = ordered::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(format_double(m(r, c)));
  }
  return arr;
}

double decimal(const nlohmann::json& j, const std::string& what) {
  if (!j.is_string()) throw FormatError("io", "checkpoint: " + what + " must be a decimal string");
  const auto v = parse_double(j.get<std::string>());
  if (!v) throw FormatError("io", "checkpoint: bad decimal in " + what);
  return *v;
}

std::vector<double> decimals(const nlohmann::json& doc, const char* key, std::size_t layer,
                             std::size_t expected) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw ShapeError(layer, std::string("missing array '") + key + "'");
  }
  const auto& arr = doc.at(key);
  if (arr.size() != expected) {
    throw ShapeError(layer, std::string("'") + key + "' has " + std::to_string(arr.size()) +
                                " values, expected " + std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : arr) {
    const double x = decimal(v, "layer " + std::to_string(layer) + " " + key);
    if (!std::isfinite(x)) throw ShapeError(layer, std::string("non-finite value in '") + key + "'");
    out.push_back(x);
  }
  return out;
}

template <typename T>
T required(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw FormatError("io", std::string("checkpoint: missing '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError("io", std::string("checkpoint: bad '") + key + "'");
  }
}

encoders::HeadConfig config_from_json(const nlohmann::json& j) {
  encoders::HeadConfig c;
  const auto pathway = encoders::parse_pathway(required<std::string>(j, "pathway"));
  if (!pathway) throw FormatError("io", "checkpoint: unknown pathway");
  c.pathway = *pathway;
  c.layer_dims = required<std::vector<std::size_t>>(j, "layer_dims");
  c.learning_rate = required<double>(j, "learning_rate");
  c.batch_size = required<std::size_t>(j, "batch_size");
  c.max_epochs = required<std::size_t>(j, "max_epochs");
  c.patience = j.contains("patience") && j.at("patience").is_null()
                   ? encoders::kNoPatience
                   : required<std::size_t>(j, "patience");
  c.validation_fraction = required<double>(j, "validation_fraction");
  c.seed = required<std::uint64_t>(j, "seed");
  return c;
}

}  // namespace

ordered config_to_json(const encoders::HeadConfig& c) {
  ordered j;
  j["pathway"] = encoders::pathway_name(c.pathway);
  j["layer_dims"] = c.layer_dims;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience == encoders::kNoPatience ? ordered(nullptr) : ordered(c.patience);
  j["validation_fraction"] = c.validation_fraction;
  j["seed"] = c.seed;
  return j;
}

ordered checkpoint_to_json(const encoders::TrainedHead& trained) {
  const nn::MlpHead& head = trained.head;
  ordered doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["pathway"] = encoders::pathway_name(trained.config.pathway);
  doc["layer_dims"] = head.layer_dims;
  doc["seed"] = head.rng_seed;
  doc["config"] = config_to_json(trained.config);
  doc["best_validation_mse"] = format_double(trained.best_validation_mse);
  doc["best_epoch"] = trained.best_epoch;
  doc["epochs_run"] = trained.epochs_run;
  ordered log = ordered::array();
  for (const auto& e : trained.training_log) {
    log.push_back({format_double(e.train_mse), format_double(e.val_mse)});
  }
  doc["training_log"] = log;

  ordered params = ordered::array();
  for (std::size_t l = 0; l < head.layers.size(); ++l) {
    ordered layer;
    layer["weights"] = row_major(head.layers[l].weights);
    layer["bias"] = strings_of(head.layers[l].bias.data(), head.layers[l].bias.size());
    if (l < head.norms.size()) {
      const auto& norm = head.norms[l];
      layer["gamma"] = strings_of(norm.gamma.data(), norm.gamma.size());
      layer["beta"] = strings_of(norm.beta.data(), norm.beta.size());
      layer["epsilon"] = format_double(norm.epsilon);
    }
    params.push_back(layer);
  }
  doc["parameters"] = params;
  return doc;
}

encoders::TrainedHead checkpoint_from_json(const nlohmann::json& doc) {
  const int version = required<int>(doc, "format_version");
  if (version != kCheckpointFormatVersion) {
    throw FormatError("io", "checkpoint: unsupported format_version " + std::to_string(version));
  }
  encoders::TrainedHead t;
  t.config = config_from_json(required<nlohmann::json>(doc, "config"));
  const auto pathway = encoders::parse_pathway(required<std::string>(doc, "pathway"));
  if (!pathway || *pathway != t.config.pathway) {
    throw FormatError("io", "checkpoint: pathway disagrees with config");
  }

  nn::MlpHead& head = t.head;
  head.layer_dims = required<std::vector<std::size_t>>(doc, "layer_dims");
  try {
    nn::validate_layer_dims(head.layer_dims);
  } catch (const InvalidArgument& e) {
    throw FormatError("io", std::string("checkpoint: ") + e.what());
  }
  head.rng_seed = required<std::uint64_t>(doc, "seed");
  t.best_validation_mse = decimal(required<nlohmann::json>(doc, "best_validation_mse"),
                                  "best_validation_mse");
  t.best_epoch = required<std::size_t>(doc, "best_epoch");
  t.epochs_run = required<std::size_t>(doc, "epochs_run");
  for (const auto& e : required<nlohmann::json>(doc, "training_log")) {
    if (!e.is_array() || e.size() != 2) throw FormatError("io", "checkpoint: bad training_log entry");
    t.training_log.push_back({decimal(e[0], "training_log"), decimal(e[1], "training_log")});
  }
  if (t.training_log.size() != t.epochs_run) {
    throw FormatError("io", "checkpoint: training_log length disagrees with epochs_run");
  }

  const auto& params = required<nlohmann::json>(doc, "parameters");
  const std::size_t n_layers = head.layer_dims.size() - 1;
  if (!params.is_array() || params.size() != n_layers) {
    throw ShapeError(params.is_array() ? params.size() : 0,
                     "expected " + std::to_string(n_layers) + " layers in parameters");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto in = head.layer_dims[l];
    const auto out = head.layer_dims[l + 1];
    const auto& p = params[l];
    const auto w = decimals(p, "weights", l, in * out);
    const auto b = decimals(p, "bias", l, out);
    nn::DenseLayer layer{nn::Matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
                         nn::Vector(static_cast<Eigen::Index>(out))};
    for (std::size_t r = 0; r < out; ++r) {
      for (std::size_t c = 0; c < in; ++c) {
        layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r * in + c];
      }
      layer.bias(static_cast<Eigen::Index>(r)) = b[r];
    }
    head.layers.push_back(std::move(layer));
    if (l + 1 < n_layers) {
      const auto g = decimals(p, "gamma", l, out);
      const auto be = decimals(p, "beta", l, out);
      nn::LayerNormParams norm;
      norm.gamma = Eigen::Map<const nn::Vector>(g.data(), static_cast<Eigen::Index>(out));
      norm.beta = Eigen::Map<const nn::Vector>(be.data(), static_cast<Eigen::Index>(out));
      norm.epsilon = decimal(required<nlohmann::json>(p, "epsilon"), "epsilon");
      if (!(norm.epsilon > 0.0)) throw ShapeError(l, "epsilon must be positive");
      head.norms.push_back(std::move(norm));
    } else if (p.contains("gamma") || p.contains("beta")) {
      throw ShapeError(l, "output layer must not carry layer-norm parameters");
    }
  }
  return t;
}

std::string format_checkpoint(const encoders::TrainedHead& trained) {
  return checkpoint_to_json(trained).dump(1) + "\n";
}

encoders::TrainedHead parse_checkpoint(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("io", std::string("checkpoint: invalid JSON: ") + e.what());
  }
  return checkpoint_from_json(doc);
}

void save_checkpoint(const encoders::TrainedHead& trained, const std::filesystem::path& path) {
  write_file(path, format_checkpoint(trained));
}

encoders::TrainedHead load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace toolsel::io

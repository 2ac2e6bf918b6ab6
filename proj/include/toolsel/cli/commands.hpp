#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "toolsel/core/records.hpp"
#include "toolsel/encoders/train.hpp"
#include "toolsel/matching/similarity.hpp"
#include "toolsel/io/synthetic.hpp"

namespace toolsel::cli {

// Bad flags or flag values; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenSynthArgs {
  io::Preset preset = io::Preset::small;
  io::SyntheticSpec spec;
  std::filesystem::path out_dir = ".";
};

struct TrainArgs {
  encoders::Pathway pathway = encoders::Pathway::visual;
  std::filesystem::path embeddings;
  std::filesystem::path manifest;
  std::filesystem::path catalog;
  std::filesystem::path checkpoint_out;
  std::optional<std::vector<std::size_t>> hidden_dims;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> max_epochs;
  std::size_t patience = 50;  // 0 disables early stopping
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;
};

enum class EvalKind { attribute_wise, most_similar_class };

struct EvalArgs {
  EvalKind kind = EvalKind::attribute_wise;
  std::filesystem::path head;
  std::filesystem::path embeddings;
  std::filesystem::path manifest;
  std::filesystem::path catalog;
  Split split = Split::test;
  matching::AblationMask mask;
};

struct MatchArgs {
  std::filesystem::path visual_head;
  std::filesystem::path language_head;
  std::filesystem::path visual_embeddings;
  std::filesystem::path visual_manifest;
  std::filesystem::path scenario_embeddings;
  std::filesystem::path scenario_manifest;
  std::filesystem::path catalog;
  std::filesystem::path trials;
  matching::SimilarityMetric metric = matching::SimilarityMetric::cosine;
  matching::AblationMask mask;
  bool clamp_predictions = false;
};

enum class AblateTarget { attribute_wise, most_similar_class, matching };

struct AblateArgs {
  AblateTarget which = AblateTarget::matching;
  EvalArgs eval;    // used for attr / class
  MatchArgs match;  // used for matching
};

struct GradcheckArgs {
  std::vector<std::size_t> dims;
  std::uint64_t seed = 0;
  double perturbation = 1e-5;
  std::size_t samples = 2;
};

struct Command {
  std::string name;
  std::variant<GenSynthArgs, TrainArgs, EvalArgs, MatchArgs, AblateArgs, GradcheckArgs> args;
  std::optional<std::filesystem::path> report_path;
};

// Pathway defaults overridden by whichever flags were given.
encoders::HeadConfig resolve_head_config(const TrainArgs& args, std::size_t input_dim);

// Arguments exclude the program name. Throws UsageError.
Command parse_command(const std::vector<std::string>& args);

struct RunOutcome {
  int exit_status = 0;
  nlohmann::ordered_json report;
};

// Runs the command; library errors propagate as toolsel::Error.
RunOutcome run(const Command& command);

// parse + run + report emission with exit codes 0 / 1 (runtime) / 2 (usage).
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace toolsel::cli

#include "toolsel/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "toolsel/cli/fingerprint.hpp"
#include "toolsel/core/error.hpp"
#include "toolsel/core/random.hpp"
#include "toolsel/io/catalog_file.hpp"
#include "toolsel/io/checkpoint.hpp"
#include "toolsel/io/embedding_file.hpp"
#include "toolsel/io/jsonl_files.hpp"
#include "toolsel/io/text.hpp"
#include "toolsel/metrics/ablation.hpp"
#include "toolsel/metrics/metrics.hpp"
#include "toolsel/nn/gradcheck.hpp"

namespace toolsel::cli {

namespace {

using ordered = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

std::vector<std::size_t> parse_dims(const std::string& s, const std::string& flag) {
  std::vector<std::size_t> dims;
  for (const auto& t : split_commas(s)) {
    const auto v = io::parse_u64(t);
    if (!v || *v == 0) throw UsageError(flag + ": '" + t + "' is not a positive integer");
    dims.push_back(static_cast<std::size_t>(*v));
  }
  if (dims.empty()) throw UsageError(flag + ": empty list");
  return dims;
}

matching::AblationMask parse_mask(const std::string& s) {
  std::set<std::size_t> removed;
  for (const auto& t : split_commas(s)) {
    if (const auto idx = attribute_index(t)) {
      removed.insert(*idx);
    } else if (const auto n = io::parse_u64(t); n && *n < kAttributeCount) {
      removed.insert(static_cast<std::size_t>(*n));
    } else {
      throw UsageError("--mask: unknown attribute '" + t + "'");
    }
  }
  try {
    return matching::AblationMask(std::move(removed));
  } catch (const InvalidArgument& e) {
    throw UsageError(std::string("--mask: ") + e.what());
  }
}

ordered mask_json(const matching::AblationMask& mask) {
  ordered arr = ordered::array();
  for (const auto i : mask.removed()) arr.push_back(attribute_name(i));
  return arr;
}

// Options shared by eval-attr, eval-class and ablate.
struct EvalFlags {
  std::string split = "test";
  std::string mask;
};

void add_eval_options(CLI::App* app, EvalArgs& a, EvalFlags& f, bool required) {
  app->add_option("--head", a.head, "head checkpoint")->required(required);
  app->add_option("--embeddings", a.embeddings, "embedding file")->required(required);
  app->add_option("--manifest", a.manifest, "embedding manifest")->required(required);
  app->add_option("--catalog", a.catalog, "tool catalog CSV")->required(required);
  app->add_option("--split", f.split, "split to evaluate")->check(CLI::IsMember({"train", "test"}));
}

struct MatchFlags {
  std::string metric = "cosine";
  std::string mask;
};

void add_match_options(CLI::App* app, MatchArgs& a, MatchFlags& f, bool required) {
  app->add_option("--visual-head", a.visual_head)->required(required);
  app->add_option("--language-head", a.language_head)->required(required);
  app->add_option("--visual-embeddings", a.visual_embeddings)->required(required);
  app->add_option("--visual-manifest", a.visual_manifest)->required(required);
  app->add_option("--scenario-embeddings", a.scenario_embeddings)->required(required);
  app->add_option("--scenario-manifest", a.scenario_manifest)->required(required);
  app->add_option("--catalog", a.catalog)->required(required);
  app->add_option("--trials", a.trials)->required(required);
  app->add_option("--metric", f.metric, "cosine or euclid")
      ->check(CLI::IsMember({"cosine", "euclid"}));
  app->add_flag("--clamp", a.clamp_predictions, "clamp predictions to [1,7] before matching");
}

void require_paths(std::initializer_list<std::pair<const char*, const fs::path*>> paths) {
  for (const auto& [flag, p] : paths) {
    if (p->empty()) throw UsageError(std::string(flag) + " is required");
  }
}

// ---------------------------------------------------------------------------

struct Inputs {
  ordered fingerprints = ordered::object();

  void add(const std::string& role, const fs::path& p) {
    fingerprints[role] = {{"path", p.string()}, {"sha256", file_sha256(p)}};
  }
};

encoders::TrainedHead load_head(const fs::path& p, std::size_t dim, const char* role) {
  auto head = io::load_checkpoint(p);
  if (head.head.input_dim() != dim) {
    throw InvalidArgument("cli", std::string(role) + " head expects input dimension " +
                                     std::to_string(head.head.input_dim()) + ", embeddings have " +
                                     std::to_string(dim));
  }
  return head;
}

struct EvalData {
  io::LoadedCatalog catalog;
  encoders::TrainedHead head;
  encoders::PredictionTable preds;
  std::vector<ItemId> items;
  encoders::EmbeddingProvider provider;
};

EvalData load_eval(const EvalArgs& a, Inputs& inputs) {
  inputs.add("catalog", a.catalog);
  inputs.add("embeddings", a.embeddings);
  inputs.add("manifest", a.manifest);
  inputs.add("head", a.head);
  EvalData d{io::load_catalog(a.catalog), {}, {}, {}, io::read_embeddings(a.embeddings, a.manifest)};
  io::check_tools(d.provider, d.catalog.catalog);
  d.head = load_head(a.head, d.provider.dim(), "evaluated");
  d.items = d.provider.items(a.split);
  if (d.items.empty()) {
    throw InvalidArgument("cli", "no items in split " + std::string(split_name(a.split)));
  }
  d.preds = encoders::predict_items(d.head.head, d.provider, d.items);
  return d;
}

metrics::EvaluationReport evaluate(const EvalData& d, EvalKind kind,
                                   const matching::AblationMask& mask) {
  if (kind == EvalKind::attribute_wise) {
    std::vector<AttributeVector> preds;
    std::vector<RatingVector> truths;
    for (const ItemId id : d.items) {
      preds.push_back(d.preds.at(id));
      truths.push_back(d.catalog.rounded.at(d.provider.tool_id(id)));
    }
    return metrics::attribute_wise_accuracy(preds, truths, mask);
  }
  std::vector<metrics::LabeledPrediction> preds;
  for (const ItemId id : d.items) preds.push_back({d.provider.tool_id(id), d.preds.at(id)});
  return metrics::most_similar_class_accuracy(preds, d.catalog.catalog, mask);
}

struct MatchData {
  io::LoadedCatalog catalog;
  encoders::EmbeddingProvider visual;
  encoders::EmbeddingProvider scenario;
  std::vector<MatchingTrial> trials;
  encoders::PredictionTable visual_preds;
  encoders::PredictionTable scenario_preds;
};

MatchData load_match(const MatchArgs& a, Inputs& inputs) {
  inputs.add("catalog", a.catalog);
  inputs.add("visual_embeddings", a.visual_embeddings);
  inputs.add("visual_manifest", a.visual_manifest);
  inputs.add("scenario_embeddings", a.scenario_embeddings);
  inputs.add("scenario_manifest", a.scenario_manifest);
  inputs.add("trials", a.trials);
  inputs.add("visual_head", a.visual_head);
  inputs.add("language_head", a.language_head);

  MatchData d{io::load_catalog(a.catalog),
              io::read_embeddings(a.visual_embeddings, a.visual_manifest),
              io::read_embeddings(a.scenario_embeddings, a.scenario_manifest),
              io::read_trials(a.trials),
              {},
              {}};
  io::check_tools(d.visual, d.catalog.catalog);
  io::check_tools(d.scenario, d.catalog.catalog);
  for (const auto& t : d.trials) {
    validate_trial(
        t, [&](ItemId id) { return d.scenario.tool_id(id); },
        [&](ItemId id) { return d.visual.tool_id(id); });
  }
  const auto visual_head = load_head(a.visual_head, d.visual.dim(), "visual");
  const auto language_head = load_head(a.language_head, d.scenario.dim(), "language");

  std::vector<ItemId> scenario_items;
  std::vector<ItemId> visual_items;
  for (const auto& t : d.trials) {
    scenario_items.push_back(t.scenario_item_id);
    visual_items.insert(visual_items.end(), t.candidate_item_ids.begin(), t.candidate_item_ids.end());
  }
  d.scenario_preds = encoders::predict_items(language_head.head, d.scenario, scenario_items);
  d.visual_preds = encoders::predict_items(visual_head.head, d.visual, visual_items);
  return d;
}

metrics::MatchingEvaluation evaluate_matching(const MatchData& d, const MatchArgs& a,
                                              const matching::AblationMask& mask) {
  metrics::MatchingOptions options{a.metric, mask, a.clamp_predictions};
  return metrics::matching_accuracy(d.trials, d.scenario_preds, d.visual_preds, options);
}

ordered trial_tables(const MatchData& d, const metrics::MatchingEvaluation& eval) {
  ordered rows = ordered::array();
  for (const auto& t : eval.trials) {
    ordered ranking = ordered::array();
    for (const auto& s : t.ranking) {
      ranking.push_back({{"item_id", s.id}, {"tool_id", d.visual.tool_id(s.id)}, {"score", s.score}});
    }
    ordered row;
    row["trial_id"] = t.trial_id;
    row["target_item_id"] = t.target_item_id;
    row["selected_item_id"] = t.selected_item_id ? ordered(*t.selected_item_id) : ordered(nullptr);
    row["correct"] = t.correct;
    row["ranking"] = ranking;
    if (!t.error.empty()) row["error"] = t.error;
    rows.push_back(row);
  }
  return rows;
}

ordered eval_config(const EvalArgs& a) {
  return {{"head", a.head.string()},
          {"embeddings", a.embeddings.string()},
          {"manifest", a.manifest.string()},
          {"catalog", a.catalog.string()},
          {"split", split_name(a.split)},
          {"mask", mask_json(a.mask)}};
}

ordered match_config(const MatchArgs& a) {
  return {{"visual_head", a.visual_head.string()},
          {"language_head", a.language_head.string()},
          {"visual_embeddings", a.visual_embeddings.string()},
          {"visual_manifest", a.visual_manifest.string()},
          {"scenario_embeddings", a.scenario_embeddings.string()},
          {"scenario_manifest", a.scenario_manifest.string()},
          {"catalog", a.catalog.string()},
          {"trials", a.trials.string()},
          {"metric", a.metric == matching::SimilarityMetric::cosine ? "cosine" : "euclid"},
          {"mask", mask_json(a.mask)},
          {"clamp_predictions", a.clamp_predictions}};
}

// ---------------------------------------------------------------------------

RunOutcome run_gen_synth(const GenSynthArgs& a, ordered& report) {
  const auto data = io::generate_synthetic(a.spec);
  fs::create_directories(a.out_dir);
  const auto paths = io::DatasetPaths::in(a.out_dir);
  io::write_dataset(data, paths);

  const auto& s = a.spec;
  report["config"] = {{"preset", io::preset_name(a.preset)},
                      {"tools", s.n_tools},
                      {"images_train", s.images_per_tool.train},
                      {"images_test", s.images_per_tool.test},
                      {"scenarios_train", s.scenarios_per_tool.train},
                      {"scenarios_test", s.scenarios_per_tool.test},
                      {"visual_dim", s.visual_dim},
                      {"language_dim", s.language_dim},
                      {"sigma", s.noise_sigma},
                      {"seed", s.seed},
                      {"out_dir", a.out_dir.string()}};
  report["fingerprints"] = ordered::object();
  ordered artifacts = ordered::object();
  for (const auto& [role, p] : {std::pair{"catalog", paths.catalog},
                                {"visual_embeddings", paths.visual_embeddings},
                                {"visual_manifest", paths.visual_manifest},
                                {"scenario_embeddings", paths.scenario_embeddings},
                                {"scenario_manifest", paths.scenario_manifest},
                                {"scenarios", paths.scenarios},
                                {"trials", paths.trials}}) {
    artifacts[role] = {{"path", p.string()}, {"sha256", file_sha256(p)}};
  }
  report["artifacts"] = artifacts;
  report["reports"] = ordered::array({ordered{{"metric_name", "dataset_summary"},
                                              {"tools", data.catalog.size()},
                                              {"visual_items", data.visual.size()},
                                              {"scenario_items", data.scenario_embeddings.size()},
                                              {"trials", data.trials.size()}}});
  return {0, report};
}

RunOutcome run_train(const TrainArgs& a, ordered& report) {
  Inputs inputs;
  inputs.add("catalog", a.catalog);
  inputs.add("embeddings", a.embeddings);
  inputs.add("manifest", a.manifest);
  const auto catalog = io::load_catalog(a.catalog);
  const auto provider = io::read_embeddings(a.embeddings, a.manifest);
  io::check_tools(provider, catalog.catalog);

  const auto config = resolve_head_config(a, provider.dim());

  const auto trained = encoders::train_head(provider, catalog.catalog, config);
  io::save_checkpoint(trained, a.checkpoint_out);

  ordered cfg = io::config_to_json(config);
  cfg["embeddings"] = a.embeddings.string();
  cfg["manifest"] = a.manifest.string();
  cfg["catalog"] = a.catalog.string();
  cfg["out"] = a.checkpoint_out.string();
  report["config"] = cfg;
  report["fingerprints"] = inputs.fingerprints;
  report["reports"] = ordered::array({ordered{{"metric_name", "training"},
                                              {"best_validation_mse", trained.best_validation_mse},
                                              {"best_epoch", trained.best_epoch},
                                              {"epochs_run", trained.epochs_run}}});
  report["artifacts"] = {{"checkpoint", {{"path", a.checkpoint_out.string()},
                                         {"sha256", file_sha256(a.checkpoint_out)}}}};
  return {0, report};
}

RunOutcome run_eval(const EvalArgs& a, ordered& report) {
  Inputs inputs;
  const auto data = load_eval(a, inputs);
  report["config"] = eval_config(a);
  report["fingerprints"] = inputs.fingerprints;
  report["reports"] = ordered::array({ordered(metrics::to_json(evaluate(data, a.kind, a.mask)))});
  report["artifacts"] = ordered::object();
  return {0, report};
}

RunOutcome run_match(const MatchArgs& a, ordered& report) {
  Inputs inputs;
  const auto data = load_match(a, inputs);
  const auto eval = evaluate_matching(data, a, a.mask);
  report["config"] = match_config(a);
  report["fingerprints"] = inputs.fingerprints;
  report["reports"] = ordered::array({ordered(metrics::to_json(eval.report)),
                                      ordered(metrics::to_json(metrics::first_slot_accuracy(data.trials)))});
  report["trials"] = trial_tables(data, eval);
  report["artifacts"] = ordered::object();
  return {0, report};
}

RunOutcome run_ablate(const AblateArgs& a, ordered& report) {
  Inputs inputs;
  metrics::AblationTable table;
  if (a.which == AblateTarget::matching) {
    const auto data = load_match(a.match, inputs);
    table = metrics::ablation_sweep(
        [&](const matching::AblationMask& mask) { return evaluate_matching(data, a.match, mask).report; });
    report["config"] = match_config(a.match);
  } else {
    const auto kind =
        a.which == AblateTarget::attribute_wise ? EvalKind::attribute_wise : EvalKind::most_similar_class;
    const auto data = load_eval(a.eval, inputs);
    table = metrics::ablation_sweep(
        [&](const matching::AblationMask& mask) { return evaluate(data, kind, mask); });
    report["config"] = eval_config(a.eval);
  }
  report["config"]["which"] = a.which == AblateTarget::matching         ? "matching"
                              : a.which == AblateTarget::attribute_wise ? "attr"
                                                                        : "class";
  report["fingerprints"] = inputs.fingerprints;
  report["reports"] = ordered::array({ordered(metrics::to_json(table.baseline))});
  report["ablation"] = ordered(metrics::to_json(table));
  report["artifacts"] = ordered::object();
  return {0, report};
}

RunOutcome run_gradcheck(const GradcheckArgs& a, ordered& report) {
  const auto head = nn::init_head(a.dims, a.seed);
  Rng rng(a.seed, streams::shuffle);
  nn::Matrix inputs(static_cast<Eigen::Index>(a.dims.front()), static_cast<Eigen::Index>(a.samples));
  nn::Matrix targets(static_cast<Eigen::Index>(kAttributeCount), static_cast<Eigen::Index>(a.samples));
  for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
    for (Eigen::Index r = 0; r < inputs.rows(); ++r) inputs(r, c) = rng.normal();
    for (Eigen::Index r = 0; r < targets.rows(); ++r) targets(r, c) = rng.uniform(1.0, 7.0);
  }
  const auto result = nn::gradcheck(head, inputs, targets, a.perturbation);
  constexpr double kTolerance = 1e-4;
  const bool pass = result.max_relative_error < kTolerance;

  report["config"] = {{"dims", a.dims},
                      {"seed", a.seed},
                      {"perturbation", a.perturbation},
                      {"samples", a.samples}};
  report["fingerprints"] = ordered::object();
  report["reports"] = ordered::array({ordered{{"metric_name", "gradcheck"},
                                              {"max_relative_error", result.max_relative_error},
                                              {"tolerance", kTolerance},
                                              {"parameters_checked", result.parameters_checked},
                                              {"pass", pass}}});
  report["artifacts"] = ordered::object();
  return {pass ? 0 : 1, report};
}

}  // namespace

encoders::HeadConfig resolve_head_config(const TrainArgs& a, std::size_t input_dim) {
  auto config = encoders::HeadConfig::defaults(a.pathway, input_dim);
  if (a.hidden_dims) {
    config.layer_dims = {input_dim};
    config.layer_dims.insert(config.layer_dims.end(), a.hidden_dims->begin(), a.hidden_dims->end());
    config.layer_dims.push_back(kAttributeCount);
  }
  if (a.learning_rate) config.learning_rate = *a.learning_rate;
  if (a.batch_size) config.batch_size = *a.batch_size;
  if (a.max_epochs) config.max_epochs = *a.max_epochs;
  config.patience = a.patience == 0 ? encoders::kNoPatience : a.patience;
  config.validation_fraction = a.validation_fraction;
  config.seed = a.seed;
  return config;
}

Command parse_command(const std::vector<std::string>& args) {
  CLI::App app{"Attribute-space tool selection toolkit", "toolsel"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Command cmd;
  std::string report_path;

  // gen-synth
  GenSynthArgs gen;
  std::string preset = "small";
  std::size_t tools = 115;
  double sigma = 0.0;
  std::uint64_t gen_seed = 0;
  std::optional<std::size_t> images_train;
  std::optional<std::size_t> images_test;
  std::size_t dv = 32;
  std::size_t dl = 32;
  auto* gen_cmd = app.add_subcommand("gen-synth", "generate a synthetic dataset");
  gen_cmd->add_option("--preset", preset)->check(CLI::IsMember({"small", "medium", "large"}));
  gen_cmd->add_option("--tools", tools);
  gen_cmd->add_option("--sigma", sigma);
  gen_cmd->add_option("--seed", gen_seed);
  gen_cmd->add_option("--visual-dim", dv);
  gen_cmd->add_option("--language-dim", dl);
  gen_cmd->add_option("--images-train", images_train, "override preset images per tool");
  gen_cmd->add_option("--images-test", images_test);
  gen_cmd->add_option("--out-dir", gen.out_dir)->required();
  gen_cmd->add_option("--report", report_path);

  // train
  TrainArgs train;
  std::string pathway = "visual";
  std::string hidden;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  std::optional<std::size_t> epochs;
  auto* train_cmd = app.add_subcommand("train", "train an attribute head");
  train_cmd->add_option("--pathway", pathway)->required()->check(CLI::IsMember({"visual", "language"}));
  train_cmd->add_option("--embeddings", train.embeddings)->required();
  train_cmd->add_option("--manifest", train.manifest)->required();
  train_cmd->add_option("--catalog", train.catalog)->required();
  train_cmd->add_option("--out", train.checkpoint_out, "checkpoint path")->required();
  train_cmd->add_option("--hidden", hidden, "hidden layer widths, e.g. 256,64");
  train_cmd->add_option("--lr", lr);
  train_cmd->add_option("--batch", batch);
  train_cmd->add_option("--epochs", epochs);
  train_cmd->add_option("--patience", train.patience, "0 disables early stopping");
  train_cmd->add_option("--val-fraction", train.validation_fraction);
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--report", report_path);

  // eval-attr / eval-class
  EvalArgs eval_attr;
  EvalFlags attr_flags;
  auto* attr_cmd = app.add_subcommand("eval-attr", "attribute-wise accuracy");
  add_eval_options(attr_cmd, eval_attr, attr_flags, true);
  attr_cmd->add_option("--mask", attr_flags.mask);
  attr_cmd->add_option("--out,--report", report_path);

  EvalArgs eval_class;
  EvalFlags class_flags;
  auto* class_cmd = app.add_subcommand("eval-class", "most-similar-class accuracy");
  add_eval_options(class_cmd, eval_class, class_flags, true);
  class_cmd->add_option("--mask", class_flags.mask);
  class_cmd->add_option("--out,--report", report_path);

  // match
  MatchArgs match;
  MatchFlags match_flags;
  auto* match_cmd = app.add_subcommand("match", "end-to-end matching accuracy");
  add_match_options(match_cmd, match, match_flags, true);
  match_cmd->add_option("--mask", match_flags.mask);
  match_cmd->add_option("--out,--report", report_path);

  // ablate
  AblateArgs ablate;
  std::string which;
  EvalFlags ablate_eval_flags;
  MatchFlags ablate_match_flags;
  auto* ablate_cmd = app.add_subcommand("ablate", "single-attribute removal sweep");
  ablate_cmd->add_option("--which", which)->required()->check(CLI::IsMember({"attr", "class", "matching"}));
  ablate_cmd->add_option("--head", ablate.eval.head);
  ablate_cmd->add_option("--embeddings", ablate.eval.embeddings);
  ablate_cmd->add_option("--manifest", ablate.eval.manifest);
  ablate_cmd->add_option("--split", ablate_eval_flags.split)->check(CLI::IsMember({"train", "test"}));
  add_match_options(ablate_cmd, ablate.match, ablate_match_flags, false);
  ablate_cmd->add_option("--out,--report", report_path);

  // gradcheck
  GradcheckArgs grad;
  std::string dims;
  auto* grad_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
  grad_cmd->add_option("--dims", dims)->required();
  grad_cmd->add_option("--seed", grad.seed);
  grad_cmd->add_option("--perturbation", grad.perturbation, "finite-difference step");
  grad_cmd->add_option("--samples", grad.samples);
  grad_cmd->add_option("--out,--report", report_path);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    std::string sub;
    for (const auto* s : app.get_subcommands()) sub = s->get_name();
    throw UsageError((sub.empty() ? "" : sub + ": ") + std::string(e.what()));
  }

  if (!report_path.empty()) cmd.report_path = report_path;

  if (gen_cmd->parsed()) {
    cmd.name = "gen-synth";
    gen.preset = *io::parse_preset(preset);
    gen.spec = io::SyntheticSpec::from_preset(gen.preset, tools, sigma, gen_seed);
    if (images_train) gen.spec.images_per_tool.train = *images_train;
    if (images_test) gen.spec.images_per_tool.test = *images_test;
    gen.spec.visual_dim = dv;
    gen.spec.language_dim = dl;
    cmd.args = gen;
  } else if (train_cmd->parsed()) {
    cmd.name = "train";
    train.pathway = *encoders::parse_pathway(pathway);
    if (!hidden.empty()) train.hidden_dims = parse_dims(hidden, "--hidden");
    if (lr && !(*lr > 0.0)) throw UsageError("--lr must be positive");
    if (batch && *batch == 0) throw UsageError("--batch must be positive");
    if (!(train.validation_fraction > 0.0 && train.validation_fraction < 1.0)) {
      throw UsageError("--val-fraction must lie in (0,1)");
    }
    train.learning_rate = lr;
    train.batch_size = batch;
    train.max_epochs = epochs;
    cmd.args = train;
  } else if (attr_cmd->parsed() || class_cmd->parsed()) {
    const bool attr = attr_cmd->parsed();
    cmd.name = attr ? "eval-attr" : "eval-class";
    EvalArgs e = attr ? eval_attr : eval_class;
    const EvalFlags& f = attr ? attr_flags : class_flags;
    e.kind = attr ? EvalKind::attribute_wise : EvalKind::most_similar_class;
    e.split = *parse_split(f.split);
    e.mask = parse_mask(f.mask);
    cmd.args = e;
  } else if (match_cmd->parsed()) {
    cmd.name = "match";
    match.metric = *matching::parse_metric(match_flags.metric);
    match.mask = parse_mask(match_flags.mask);
    cmd.args = match;
  } else if (ablate_cmd->parsed()) {
    cmd.name = "ablate";
    ablate.which = which == "attr"    ? AblateTarget::attribute_wise
                   : which == "class" ? AblateTarget::most_similar_class
                                      : AblateTarget::matching;
    if (ablate.which == AblateTarget::matching) {
      const auto& m = ablate.match;
      require_paths({{"--visual-head", &m.visual_head},
                     {"--language-head", &m.language_head},
                     {"--visual-embeddings", &m.visual_embeddings},
                     {"--visual-manifest", &m.visual_manifest},
                     {"--scenario-embeddings", &m.scenario_embeddings},
                     {"--scenario-manifest", &m.scenario_manifest},
                     {"--catalog", &m.catalog},
                     {"--trials", &m.trials}});
      ablate.match.metric = *matching::parse_metric(ablate_match_flags.metric);
    } else {
      ablate.eval.catalog = ablate.match.catalog;
      require_paths({{"--head", &ablate.eval.head},
                     {"--embeddings", &ablate.eval.embeddings},
                     {"--manifest", &ablate.eval.manifest},
                     {"--catalog", &ablate.eval.catalog}});
      ablate.eval.split = *parse_split(ablate_eval_flags.split);
    }
    cmd.args = ablate;
  } else {
    cmd.name = "gradcheck";
    grad.dims = parse_dims(dims, "--dims");
    try {
      nn::validate_layer_dims(grad.dims);
    } catch (const InvalidArgument& e) {
      throw UsageError(std::string("--dims: ") + e.what());
    }
    if (!(grad.perturbation >= 1e-6 && grad.perturbation <= 1e-3)) {
      throw UsageError("--perturbation must lie in [1e-6, 1e-3]");
    }
    if (grad.samples == 0) throw UsageError("--samples must be positive");
    cmd.args = grad;
  }
  return cmd;
}

RunOutcome run(const Command& command) {
  const auto start = std::chrono::steady_clock::now();
  ordered report;
  report["command"] = command.name;
  RunOutcome outcome = std::visit(
      [&](const auto& a) -> RunOutcome {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GenSynthArgs>) return run_gen_synth(a, report);
        if constexpr (std::is_same_v<T, TrainArgs>) return run_train(a, report);
        if constexpr (std::is_same_v<T, EvalArgs>) return run_eval(a, report);
        if constexpr (std::is_same_v<T, MatchArgs>) return run_match(a, report);
        if constexpr (std::is_same_v<T, AblateArgs>) return run_ablate(a, report);
        if constexpr (std::is_same_v<T, GradcheckArgs>) return run_gradcheck(a, report);
      },
      command.args);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  outcome.report["wall_time_seconds"] = elapsed.count();
  if (command.report_path) outcome.report["artifacts"]["report"] = command.report_path->string();
  return outcome;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Command command;
  try {
    command = parse_command(args);
  } catch (const UsageError& e) {
    const bool help = std::find(args.begin(), args.end(), "--help") != args.end() ||
                      std::find(args.begin(), args.end(), "-h") != args.end() ||
                      std::find(args.begin(), args.end(), "--help-all") != args.end();
    (help ? out : err) << e.what() << "\n";
    return help ? 0 : 2;
  }
  try {
    RunOutcome outcome = run(command);
    const std::string text = outcome.report.dump(2) + "\n";
    if (command.report_path) {
      io::write_file(*command.report_path, text);
    } else {
      out << text;
    }
    return outcome.exit_status;
  } catch (const Error& e) {
    nlohmann::ordered_json j{{"command", command.name}, {"error", {{"module", e.module()}, {"message", e.what()}}}};
    err << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    nlohmann::ordered_json j{{"command", command.name}, {"error", {{"module", "cli"}, {"message", e.what()}}}};
    err << j.dump(2) << "\n";
    return 1;
  }
}

}  // namespace toolsel::cli

#include "cwm/cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <stdexcept>

#include "cwm/eval/tables.hpp"
#include "cwm/harness/harness.hpp"
#include "cwm/mine/negmine.hpp"
#include "cwm/model/scorer.hpp"
#include "cwm/train/trainer.hpp"
#include "cwm/util/io.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/util/sha256.hpp"
#include "cwm/util/text.hpp"
#include "cwm/version.hpp"
#include "cwm/world/episode.hpp"

namespace cwm::cli {

namespace {

/// Provenance record written next to every command's primary output.
/// Contains no timestamps, so identical runs produce identical bytes.
void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::string>& args,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  nlohmann::json in_digests = nlohmann::json::object();
  for (const std::string& p : inputs) {
    in_digests[p] = util::sha256_file_hex(p);
  }
  nlohmann::json out_digests = nlohmann::json::object();
  for (const std::string& p : outputs) {
    out_digests[p] = util::sha256_file_hex(p);
  }
  nlohmann::json manifest = {{"tool_version", kToolVersion},
                             {"schema_version", kSchemaVersion},
                             {"command", command},
                             {"args", args},
                             {"inputs", std::move(in_digests)},
                             {"outputs", std::move(out_digests)}};
  util::atomic_write_file(path, manifest.dump(2) + "\n");
}

std::string default_manifest_path(const std::string& primary_output) {
  return primary_output + ".manifest.json";
}

std::vector<int> parse_variations(const std::string& spec) {
  std::vector<int> out;
  for (const std::string& part : util::split_on(spec, ',')) {
    const auto dash = part.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int lo = std::stoi(part.substr(0, dash));
      const int hi = std::stoi(part.substr(dash + 1));
      if (lo > hi) throw std::invalid_argument("bad variation range: " + part);
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(std::stoi(part));
    }
  }
  for (int v : out) {
    if (v < 0 || v > 9) {
      throw std::invalid_argument("variation out of range 0..9: " +
                                  std::to_string(v));
    }
  }
  return out;
}

std::vector<world::Family> parse_families(const std::string& spec) {
  std::vector<world::Family> out;
  if (spec == "all") {
    out = world::all_families();
  } else if (spec == "in-domain") {
    for (world::Family f : world::all_families()) {
      if (world::family_in_domain(f)) out.push_back(f);
    }
  } else if (spec == "ood") {
    for (world::Family f : world::all_families()) {
      if (!world::family_in_domain(f)) out.push_back(f);
    }
  } else {
    for (const std::string& name : util::split_on(spec, ',')) {
      out.push_back(world::family_from_string(name));
    }
  }
  if (out.empty()) throw std::invalid_argument("no families selected");
  return out;
}

std::vector<world::EpisodeLog> read_episode_logs(const std::string& path) {
  std::vector<world::EpisodeLog> logs;
  for (const auto& row : util::read_jsonl(path)) {
    logs.push_back(world::episode_log_from_json(row));
  }
  if (logs.empty()) throw std::runtime_error("no episodes in " + path);
  return logs;
}

// ---------------------------------------------------------------- gen-data

struct GenDataOptions {
  std::string families = "all";
  std::string variations = "0-9";
  int waves = 1;
  std::uint64_t seed = 7;
  std::string out;
  std::string manifest;
};

int cmd_gen_data(const GenDataOptions& opt,
                 const std::vector<std::string>& argv) {
  const auto families = parse_families(opt.families);
  const auto variations = parse_variations(opt.variations);
  if (opt.waves < 1) throw std::invalid_argument("waves must be >= 1");

  std::vector<nlohmann::json> rows;
  for (int w = 0; w < opt.waves; ++w) {
    const std::uint64_t wave_seed =
        util::derive_seed(opt.seed, "wave", static_cast<std::uint64_t>(w));
    for (world::Family family : families) {
      for (int variation : variations) {
        const std::uint64_t ep_seed = util::derive_seed(
            wave_seed, world::to_string(family),
            static_cast<std::uint64_t>(variation));
        const world::Episode ep =
            world::init_episode(family, variation, ep_seed);
        rows.push_back(world::episode_log_to_json(world::run_episode(ep)));
      }
    }
  }
  util::write_jsonl(opt.out, rows);

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  write_manifest(manifest, "gen-data", argv, {}, {opt.out});
  std::cout << "wrote " << rows.size() << " episodes to " << opt.out << "\n";
  return 0;
}

// -------------------------------------------------------------------- mine

struct MineOptions {
  std::string episodes;
  std::string out;
  std::string stats;
  std::string manifest;
  mine::MiningConfig config;
};

int cmd_mine(const MineOptions& opt, const std::vector<std::string>& argv) {
  const auto logs = read_episode_logs(opt.episodes);
  const auto instances = mine::mine_env_negatives(logs, opt.config);
  mine::write_instances(opt.out, instances);

  const std::string stats_path =
      opt.stats.empty() ? opt.out + ".stats.json" : opt.stats;
  nlohmann::json stats = mine::mining_stats_to_json(
      mine::dataset_stats(instances));
  stats["config"] = mine::mining_config_to_json(opt.config);
  stats["schema_version"] = kSchemaVersion;
  util::atomic_write_file(stats_path, stats.dump(2) + "\n");

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  write_manifest(manifest, "mine", argv, {opt.episodes},
                 {opt.out, stats_path});
  std::cout << "mined " << instances.size() << " instances to " << opt.out
            << "\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainOptions {
  std::string data;
  std::string heldout;
  std::string config_file;
  std::string out;
  std::string report;
  std::string manifest;
  train::TrainConfig config;
  // CLI-level overrides applied on top of a config file.
  std::map<std::string, double> overrides;
  std::string mode_override;
};

int cmd_train(const TrainOptions& opt, const std::vector<std::string>& argv) {
  train::TrainConfig config = opt.config;
  if (!opt.config_file.empty()) {
    config = train::train_config_from_json(
        nlohmann::json::parse(util::read_file(opt.config_file)));
  }
  for (const auto& [key, value] : opt.overrides) {
    if (key == "epochs") config.epochs = static_cast<int>(value);
    else if (key == "patience") config.patience = static_cast<int>(value);
    else if (key == "learning_rate") config.learning_rate = value;
    else if (key == "grad_accum") config.grad_accum = static_cast<int>(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(value);
  }
  if (!opt.mode_override.empty()) config.mode = opt.mode_override;

  const auto train_set = mine::read_instances(opt.data);
  std::vector<mine::TrainingInstance> heldout_set;
  if (!opt.heldout.empty()) heldout_set = mine::read_instances(opt.heldout);

  const train::TrainOutcome outcome =
      train::train(train_set, heldout_set, config);
  model::save_checkpoint(outcome.params, opt.out);

  const std::string report_path =
      opt.report.empty() ? opt.out + ".report.json" : opt.report;
  nlohmann::json report = {
      {"schema_version", kSchemaVersion},
      {"config", train::train_config_to_json(config)},
      {"report", train::train_report_to_json(outcome.report)}};
  util::atomic_write_file(report_path, report.dump(2) + "\n");

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  std::vector<std::string> inputs = {opt.data};
  if (!opt.heldout.empty()) inputs.push_back(opt.heldout);
  if (!opt.config_file.empty()) inputs.push_back(opt.config_file);
  write_manifest(manifest, "train", argv, inputs, {opt.out, report_path});

  const auto& epochs = outcome.report.epochs;
  std::cout << "trained " << config.mode << " model for " << epochs.size()
            << " epochs (best epoch " << outcome.report.best_epoch
            << ", heldout loss " << outcome.report.best_heldout_loss
            << ") -> " << opt.out << "\n";
  return 0;
}

// ----------------------------------------------------------- system flags

struct SystemOptions {
  std::string kind;
  std::string checkpoint;
  std::uint64_t system_seed = 1234;
};

harness::SystemUnderTest make_system_from_options(const SystemOptions& opt) {
  harness::SystemSpec spec;
  spec.kind = opt.kind;
  spec.checkpoint = opt.checkpoint;
  spec.seed = opt.system_seed;
  if ((spec.kind == "cwm" || spec.kind == "sft") && spec.checkpoint.empty()) {
    throw std::invalid_argument("system '" + spec.kind +
                                "' needs --checkpoint");
  }
  return harness::make_system(spec);
}

// --------------------------------------------------------- eval-intrinsic

struct EvalIntrinsicOptions {
  std::string episodes;
  SystemOptions system;
  harness::IntrinsicCounts counts;
  int max_negatives = 8;
  std::uint64_t seed = 7;
  std::string out;
  std::string manifest;
};

int cmd_eval_intrinsic(const EvalIntrinsicOptions& opt,
                       const std::vector<std::string>& argv) {
  const auto logs = read_episode_logs(opt.episodes);
  const auto episodes = harness::episodes_from_logs(logs);
  const auto cases = harness::build_intrinsic_testset(
      episodes, opt.counts, opt.seed, opt.max_negatives);
  const auto system = make_system_from_options(opt.system);
  const harness::IntrinsicReport report = harness::eval_intrinsic(system, cases);
  util::atomic_write_file(
      opt.out, harness::intrinsic_report_to_json(report).dump(2) + "\n");

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  std::vector<std::string> inputs = {opt.episodes};
  if (!opt.system.checkpoint.empty()) inputs.push_back(opt.system.checkpoint);
  write_manifest(manifest, "eval-intrinsic", argv, inputs, {opt.out});

  const auto& combined = report.categories.at(harness::kCategoryCombined);
  std::cout << "intrinsic eval of " << system.name << " on "
            << combined.instances << " cases: p@1 " << combined.p_at_1
            << ", auc " << combined.auc << " -> " << opt.out << "\n";
  return 0;
}

// ------------------------------------------------------------ eval-filter

struct EvalFilterOptions {
  std::string episodes;
  int limit = 0;
  SystemOptions system;
  std::string condition = "in_domain";
  std::string out;
  std::string manifest;
};

int cmd_eval_filter(const EvalFilterOptions& opt,
                    const std::vector<std::string>& argv) {
  if (opt.condition != "in_domain" && opt.condition != "ood") {
    throw std::invalid_argument("condition must be in_domain or ood");
  }
  auto logs = read_episode_logs(opt.episodes);
  if (opt.limit > 0 && static_cast<std::size_t>(opt.limit) < logs.size()) {
    logs.resize(static_cast<std::size_t>(opt.limit));
  }
  const auto episodes = harness::episodes_from_logs(logs);
  const auto system = make_system_from_options(opt.system);
  const harness::FilterReport report =
      harness::run_filter_eval(system, episodes, opt.condition);
  util::atomic_write_file(
      opt.out, harness::filter_report_to_json(report).dump(2) + "\n");

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  std::vector<std::string> inputs = {opt.episodes};
  if (!opt.system.checkpoint.empty()) inputs.push_back(opt.system.checkpoint);
  write_manifest(manifest, "eval-filter", argv, inputs, {opt.out});

  std::cout << "filter eval of " << system.name << " (" << opt.condition
            << ") over " << report.steps << " steps -> " << opt.out << "\n";
  return 0;
}

// ----------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> intrinsic;
  std::vector<std::string> filter;
  std::string out;
  std::string manifest;
};

int cmd_report(const ReportOptions& opt, const std::vector<std::string>& argv) {
  std::vector<harness::IntrinsicReport> intrinsic;
  for (const std::string& path : opt.intrinsic) {
    intrinsic.push_back(harness::intrinsic_report_from_json(
        nlohmann::json::parse(util::read_file(path))));
  }
  std::vector<harness::FilterReport> filter;
  for (const std::string& path : opt.filter) {
    filter.push_back(harness::filter_report_from_json(
        nlohmann::json::parse(util::read_file(path))));
  }
  if (intrinsic.empty() && filter.empty()) {
    throw std::invalid_argument("report needs at least one input");
  }

  std::string text;
  if (!intrinsic.empty()) text += eval::render_intrinsic_table(intrinsic);
  if (!filter.empty()) {
    if (!text.empty()) text += "\n";
    text += eval::render_filter_table(filter);
  }
  util::atomic_write_file(opt.out, text);

  const std::string manifest =
      opt.manifest.empty() ? default_manifest_path(opt.out) : opt.manifest;
  std::vector<std::string> inputs = opt.intrinsic;
  inputs.insert(inputs.end(), opt.filter.begin(), opt.filter.end());
  write_manifest(manifest, "report", argv, inputs, {opt.out});
  std::cout << text;
  return 0;
}

// --------------------------------------------------------------- pipeline

struct PipelineOptions {
  std::string workdir = "runs/default";
  std::uint64_t seed = 7;
  int epochs = 30;
};

int run_step(const std::vector<std::string>& args) {
  const int rc = run(args);
  if (rc != 0) {
    throw std::runtime_error("pipeline step failed: " +
                             util::join(args, " "));
  }
  return rc;
}

int cmd_pipeline(const PipelineOptions& opt,
                 const std::vector<std::string>& argv) {
  namespace fs = std::filesystem;
  fs::create_directories(opt.workdir);
  const std::string d = opt.workdir + "/";
  const std::string seed = std::to_string(opt.seed);
  const std::string epochs = std::to_string(opt.epochs);

  // Data generation: training and heldout grids per condition.
  run_step({"gen-data", "--families", "all", "--variations", "0-6",
            "--seed", seed, "--out", d + "episodes_train_all.jsonl"});
  run_step({"gen-data", "--families", "in-domain", "--variations", "0-6",
            "--seed", seed, "--out", d + "episodes_train_id.jsonl"});
  run_step({"gen-data", "--families", "all", "--variations", "7-9",
            "--waves", "3", "--seed", seed, "--out",
            d + "episodes_heldout_all.jsonl"});
  run_step({"gen-data", "--families", "in-domain", "--variations", "7-9",
            "--seed", seed, "--out", d + "episodes_heldout_id.jsonl"});
  run_step({"gen-data", "--families", "in-domain", "--variations", "7-9",
            "--waves", "2", "--seed", seed, "--out",
            d + "episodes_filter_id.jsonl"});
  run_step({"gen-data", "--families", "ood", "--variations", "0-9",
            "--seed", seed, "--out", d + "episodes_filter_ood.jsonl"});

  // Hard-negative mining.
  for (const char* name : {"train_all", "train_id", "heldout_all",
                           "heldout_id"}) {
    run_step({"mine", "--episodes", d + "episodes_" + name + ".jsonl",
              "--seed", seed, "--out", d + "instances_" + name + ".jsonl"});
  }

  // Four checkpoints: both objectives on the full grid (main) and on the
  // in-domain families only (for the OOD filter condition).
  for (const char* mode : {"cwm", "sft"}) {
    run_step({"train", "--data", d + "instances_train_all.jsonl",
              "--heldout", d + "instances_heldout_all.jsonl", "--mode", mode,
              "--epochs", epochs, "--seed", seed, "--out",
              d + std::string(mode) + "_main.ckpt"});
    run_step({"train", "--data", d + "instances_train_id.jsonl",
              "--heldout", d + "instances_heldout_id.jsonl", "--mode", mode,
              "--epochs", epochs, "--seed", seed, "--out",
              d + std::string(mode) + "_ood.ckpt"});
  }

  // Intrinsic stress test: four systems on the heldout episodes.
  run_step({"eval-intrinsic", "--episodes", d + "episodes_heldout_all.jsonl",
            "--system", "cwm", "--checkpoint", d + "cwm_main.ckpt",
            "--seed", seed, "--out", d + "intrinsic_cwm.json"});
  run_step({"eval-intrinsic", "--episodes", d + "episodes_heldout_all.jsonl",
            "--system", "sft", "--checkpoint", d + "sft_main.ckpt",
            "--seed", seed, "--out", d + "intrinsic_sft.json"});
  run_step({"eval-intrinsic", "--episodes", d + "episodes_heldout_all.jsonl",
            "--system", "untrained", "--system-seed", seed,
            "--seed", seed, "--out", d + "intrinsic_untrained.json"});
  run_step({"eval-intrinsic", "--episodes", d + "episodes_heldout_all.jsonl",
            "--system", "random", "--system-seed", seed,
            "--seed", seed, "--out", d + "intrinsic_random.json"});

  // Filter characterization: in-domain on heldout variations, OOD on
  // families the ood checkpoints never saw.
  for (const char* mode : {"cwm", "sft"}) {
    run_step({"eval-filter", "--episodes", d + "episodes_filter_id.jsonl",
              "--limit", "15", "--system", mode, "--checkpoint",
              d + std::string(mode) + "_main.ckpt", "--condition", "in_domain",
              "--out", d + "filter_" + mode + "_id.json"});
    run_step({"eval-filter", "--episodes", d + "episodes_filter_ood.jsonl",
              "--system", mode, "--checkpoint",
              d + std::string(mode) + "_ood.ckpt", "--condition", "ood",
              "--out", d + "filter_" + mode + "_ood.json"});
  }

  run_step({"report", "--intrinsic", d + "intrinsic_cwm.json",
            "--intrinsic", d + "intrinsic_sft.json",
            "--intrinsic", d + "intrinsic_untrained.json",
            "--intrinsic", d + "intrinsic_random.json",
            "--filter", d + "filter_cwm_id.json",
            "--filter", d + "filter_sft_id.json",
            "--filter", d + "filter_cwm_ood.json",
            "--filter", d + "filter_sft_ood.json",
            "--out", d + "report.txt"});

  write_manifest(d + "pipeline.manifest.json", "pipeline", argv, {},
                 {d + "report.txt"});
  std::cout << "pipeline complete -> " << d + "report.txt" << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"contrastive world-model baseline toolkit"};
  app.require_subcommand(1);

  GenDataOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data",
                                         "generate gold episode logs");
  gen_cmd->add_option("--families", gen.families,
                      "all | in-domain | ood | comma list");
  gen_cmd->add_option("--variations", gen.variations, "e.g. 0-6 or 7,8,9");
  gen_cmd->add_option("--waves", gen.waves, "seed waves over the grid");
  gen_cmd->add_option("--seed", gen.seed, "root seed");
  gen_cmd->add_option("--out", gen.out, "output episodes jsonl")->required();
  gen_cmd->add_option("--manifest", gen.manifest, "manifest path");

  MineOptions mine_opt;
  CLI::App* mine_cmd = app.add_subcommand("mine", "mine typed hard negatives");
  mine_cmd->add_option("--episodes", mine_opt.episodes, "episodes jsonl")
      ->required();
  mine_cmd->add_option("--out", mine_opt.out, "output instances jsonl")
      ->required();
  mine_cmd->add_option("--stats", mine_opt.stats, "stats json path");
  mine_cmd->add_option("--manifest", mine_opt.manifest, "manifest path");
  mine_cmd->add_option("--seed", mine_opt.config.seed, "sampling seed");
  mine_cmd->add_option("--num-negatives", mine_opt.config.num_negatives,
                       "negatives per instance");
  mine_cmd->add_option("--max-type1", mine_opt.config.max_type1,
                       "silent cap");
  mine_cmd->add_option("--max-type2", mine_opt.config.max_type2,
                       "rejected cap");
  mine_cmd->add_option("--max-type3", mine_opt.config.max_type3,
                       "cross-task cap");

  TrainOptions train_opt;
  double opt_epochs = 0, opt_patience = 0, opt_lr = 0, opt_accum = 0,
         opt_seed = 0;
  CLI::App* train_cmd = app.add_subcommand("train", "fit a scorer");
  train_cmd->add_option("--data", train_opt.data, "training instances jsonl")
      ->required();
  train_cmd->add_option("--heldout", train_opt.heldout,
                        "heldout instances jsonl");
  CLI::Option* o_mode =
      train_cmd->add_option("--mode", train_opt.config.mode, "cwm | sft")
          ->check(CLI::IsMember({"cwm", "sft"}));
  train_cmd->add_option("--config", train_opt.config_file,
                        "training config json");
  train_cmd->add_option("--out", train_opt.out, "checkpoint path")->required();
  train_cmd->add_option("--report", train_opt.report, "report json path");
  train_cmd->add_option("--manifest", train_opt.manifest, "manifest path");
  CLI::Option* o_epochs = train_cmd->add_option("--epochs", opt_epochs);
  CLI::Option* o_patience = train_cmd->add_option("--patience", opt_patience);
  CLI::Option* o_lr = train_cmd->add_option("--learning-rate", opt_lr);
  CLI::Option* o_accum = train_cmd->add_option("--grad-accum", opt_accum);
  CLI::Option* o_seed = train_cmd->add_option("--seed", opt_seed);

  EvalIntrinsicOptions ei;
  CLI::App* ei_cmd = app.add_subcommand("eval-intrinsic",
                                        "run the discrimination stress test");
  ei_cmd->add_option("--episodes", ei.episodes, "heldout episodes jsonl")
      ->required();
  ei_cmd->add_option("--system", ei.system.kind,
                     "cwm | sft | untrained | random")
      ->required()
      ->check(CLI::IsMember({"cwm", "sft", "untrained", "random"}));
  ei_cmd->add_option("--checkpoint", ei.system.checkpoint, "checkpoint path");
  ei_cmd->add_option("--system-seed", ei.system.system_seed,
                     "seed for untrained/random systems");
  ei_cmd->add_option("--rejection", ei.counts.rejection_only,
                     "rejection-only cases");
  ei_cmd->add_option("--cross", ei.counts.cross_task, "cross-task cases");
  ei_cmd->add_option("--minimal", ei.counts.minimal_edit,
                     "minimal-edit cases");
  ei_cmd->add_option("--max-negatives", ei.max_negatives,
                     "negatives per case");
  ei_cmd->add_option("--seed", ei.seed, "sampling seed");
  ei_cmd->add_option("--out", ei.out, "report json path")->required();
  ei_cmd->add_option("--manifest", ei.manifest, "manifest path");

  EvalFilterOptions ef;
  CLI::App* ef_cmd = app.add_subcommand(
      "eval-filter", "teacher-forced filter characterization");
  ef_cmd->add_option("--episodes", ef.episodes, "episodes jsonl")->required();
  ef_cmd->add_option("--limit", ef.limit, "use only the first N episodes");
  ef_cmd->add_option("--system", ef.system.kind,
                     "cwm | sft | untrained | random")
      ->required()
      ->check(CLI::IsMember({"cwm", "sft", "untrained", "random"}));
  ef_cmd->add_option("--checkpoint", ef.system.checkpoint, "checkpoint path");
  ef_cmd->add_option("--system-seed", ef.system.system_seed,
                     "seed for untrained/random systems");
  ef_cmd->add_option("--condition", ef.condition, "in_domain | ood");
  ef_cmd->add_option("--out", ef.out, "report json path")->required();
  ef_cmd->add_option("--manifest", ef.manifest, "manifest path");

  ReportOptions rep;
  CLI::App* rep_cmd = app.add_subcommand("report", "render result tables");
  rep_cmd->add_option("--intrinsic", rep.intrinsic,
                      "intrinsic report json (repeatable)");
  rep_cmd->add_option("--filter", rep.filter,
                      "filter report json (repeatable)");
  rep_cmd->add_option("--out", rep.out, "output text path")->required();
  rep_cmd->add_option("--manifest", rep.manifest, "manifest path");

  PipelineOptions pipe;
  CLI::App* pipe_cmd = app.add_subcommand(
      "pipeline", "full generate/mine/train/eval/report run");
  pipe_cmd->add_option("--workdir", pipe.workdir, "output directory");
  pipe_cmd->add_option("--seed", pipe.seed, "root seed");
  pipe_cmd->add_option("--epochs", pipe.epochs, "training epochs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen, args);
    if (mine_cmd->parsed()) return cmd_mine(mine_opt, args);
    if (train_cmd->parsed()) {
      if (o_mode->count() > 0) train_opt.mode_override = train_opt.config.mode;
      if (o_epochs->count() > 0) train_opt.overrides["epochs"] = opt_epochs;
      if (o_patience->count() > 0) {
        train_opt.overrides["patience"] = opt_patience;
      }
      if (o_lr->count() > 0) train_opt.overrides["learning_rate"] = opt_lr;
      if (o_accum->count() > 0) train_opt.overrides["grad_accum"] = opt_accum;
      if (o_seed->count() > 0) train_opt.overrides["seed"] = opt_seed;
      return cmd_train(train_opt, args);
    }
    if (ei_cmd->parsed()) return cmd_eval_intrinsic(ei, args);
    if (ef_cmd->parsed()) return cmd_eval_filter(ef, args);
    if (rep_cmd->parsed()) return cmd_report(rep, args);
    if (pipe_cmd->parsed()) return cmd_pipeline(pipe, args);
    throw std::logic_error("no subcommand dispatched");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cwm::cli

#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cwm/mine/negmine.hpp"
#include "cwm/model/scorer.hpp"
#include "cwm/world/episode.hpp"

namespace cwm::train {

struct TrainConfig {
  std::string mode = "cwm";  // "cwm" or "sft"
  int epochs = 30;
  int patience = 7;  // stop once this many epochs pass without improvement
  double learning_rate = 1e-3;
  int grad_accum = 16;  // instances averaged per optimizer step
  double tau = 0.6;
  double gamma = 2.0;
  double lambda_margin = 0.3;
  double lambda_reg = 0.005;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int embed_dim = 64;
  int hidden_dim = 64;
  std::uint64_t seed = 7;
};

nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_heldout_loss = 0.0;
  std::size_t param_count = 0;
  std::size_t train_instances = 0;
  std::size_t heldout_instances = 0;
};

nlohmann::json train_report_to_json(const TrainReport& report);

struct TrainOutcome {
  model::ScorerParams params;  // best checkpoint by heldout loss
  TrainReport report;
};

/// Minimizes the configured objective with Adam. Gradients are averaged
/// over grad_accum-instance windows; instance order reshuffles each
/// epoch from the run seed. With no heldout instances the training loss
/// drives model selection and early stopping.
TrainOutcome train(const std::vector<mine::TrainingInstance>& train_set,
                   const std::vector<mine::TrainingInstance>& heldout_set,
                   const TrainConfig& config);

/// Splits episodes by variation id: 0-6 train, 7-9 heldout.
struct EpisodeSplit {
  std::vector<world::EpisodeLog> train;
  std::vector<world::EpisodeLog> heldout;
};
EpisodeSplit split_by_variation(const std::vector<world::EpisodeLog>& episodes);

model::ScoredInstance to_scored(const mine::TrainingInstance& instance);

/// One Adam step over a flat parameter vector (bias-corrected moments).
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t size, double lr, double beta1, double beta2,
                double eps);
  void update(std::vector<double>& theta, const std::vector<double>& grad);
  int steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace cwm::train

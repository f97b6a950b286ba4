#include "cwm/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cwm/util/rng.hpp"

namespace cwm::train {

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return {{"mode", c.mode},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"learning_rate", c.learning_rate},
          {"grad_accum", c.grad_accum},
          {"tau", c.tau},
          {"gamma", c.gamma},
          {"lambda_margin", c.lambda_margin},
          {"lambda_reg", c.lambda_reg},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_eps", c.adam_eps},
          {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.mode = j.value("mode", c.mode);
  c.epochs = j.value("epochs", c.epochs);
  c.patience = j.value("patience", c.patience);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.grad_accum = j.value("grad_accum", c.grad_accum);
  c.tau = j.value("tau", c.tau);
  c.gamma = j.value("gamma", c.gamma);
  c.lambda_margin = j.value("lambda_margin", c.lambda_margin);
  c.lambda_reg = j.value("lambda_reg", c.lambda_reg);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json train_report_to_json(const TrainReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochStats& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"heldout_loss", e.heldout_loss}});
  }
  return {{"epochs", std::move(epochs)},
          {"best_epoch", r.best_epoch},
          {"best_heldout_loss", r.best_heldout_loss},
          {"param_count", r.param_count},
          {"train_instances", r.train_instances},
          {"heldout_instances", r.heldout_instances}};
}

model::ScoredInstance to_scored(const mine::TrainingInstance& inst) {
  model::ScoredInstance scored;
  scored.state = inst.state_prompt;
  scored.positive = inst.gold_surface;
  for (const auto& neg : inst.negatives) scored.negatives.push_back(neg.surface);
  return scored;
}

EpisodeSplit split_by_variation(const std::vector<world::EpisodeLog>& episodes) {
  EpisodeSplit split;
  for (const auto& ep : episodes) {
    if (ep.variation <= 6) {
      split.train.push_back(ep);
    } else {
      split.heldout.push_back(ep);
    }
  }
  return split;
}

AdamOptimizer::AdamOptimizer(std::size_t size, double lr, double beta1,
                             double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::update(std::vector<double>& theta,
                           const std::vector<double>& grad) {
  if (theta.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("optimizer size mismatch");
  }
  t_ += 1;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    theta[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

namespace {

double mean_loss(const model::ScorerParams& params,
                 const std::vector<model::ScoredInstance>& instances,
                 const model::LossConfig& loss_config) {
  if (instances.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& inst : instances) {
    sum += model::loss_and_gradients(params, inst, loss_config).total;
  }
  return sum / static_cast<double>(instances.size());
}

}  // namespace

TrainOutcome train(const std::vector<mine::TrainingInstance>& train_set,
                   const std::vector<mine::TrainingInstance>& heldout_set,
                   const TrainConfig& config) {
  if (train_set.empty()) throw std::invalid_argument("empty training set");
  if (config.grad_accum < 1) throw std::invalid_argument("grad_accum < 1");
  if (config.epochs < 1) throw std::invalid_argument("epochs < 1");

  std::vector<model::ScoredInstance> train_scored;
  train_scored.reserve(train_set.size());
  for (const auto& inst : train_set) train_scored.push_back(to_scored(inst));
  std::vector<model::ScoredInstance> heldout_scored;
  heldout_scored.reserve(heldout_set.size());
  for (const auto& inst : heldout_set) heldout_scored.push_back(to_scored(inst));

  model::LossConfig loss_config;
  loss_config.mode = model::loss_mode_from_string(config.mode);
  loss_config.tau = config.tau;
  loss_config.gamma = config.gamma;
  loss_config.lambda_margin = config.lambda_margin;
  loss_config.lambda_reg = config.lambda_reg;

  const model::Vocabulary vocab = model::build_vocabulary();
  model::ScorerParams params = model::init_params(
      vocab, config.embed_dim, config.hidden_dim, config.seed);

  AdamOptimizer adam(params.theta.size(), config.learning_rate,
                     config.adam_beta1, config.adam_beta2, config.adam_eps);

  TrainOutcome outcome;
  outcome.report.param_count = params.param_count();
  outcome.report.train_instances = train_set.size();
  outcome.report.heldout_instances = heldout_set.size();
  outcome.params = params;

  double best = std::numeric_limits<double>::infinity();
  int epochs_since_best = 0;

  std::vector<std::size_t> order(train_scored.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    util::Rng shuffle_rng(util::derive_seed(
        config.seed, "epoch_shuffle", static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::vector<double> accum(params.theta.size(), 0.0);
    std::size_t in_window = 0;

    const auto flush = [&] {
      if (in_window == 0) return;
      const double inv = 1.0 / static_cast<double>(in_window);
      for (double& g : accum) g *= inv;
      adam.update(params.theta, accum);
      std::fill(accum.begin(), accum.end(), 0.0);
      in_window = 0;
    };

    for (std::size_t idx : order) {
      const model::LossResult result =
          model::loss_and_gradients(params, train_scored[idx], loss_config);
      epoch_loss += result.total;
      for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += result.grad[i];
      in_window += 1;
      if (in_window == static_cast<std::size_t>(config.grad_accum)) flush();
    }
    flush();

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(train_scored.size());
    stats.heldout_loss = heldout_scored.empty()
                             ? stats.train_loss
                             : mean_loss(params, heldout_scored, loss_config);
    outcome.report.epochs.push_back(stats);

    if (stats.heldout_loss < best) {
      best = stats.heldout_loss;
      outcome.report.best_epoch = epoch;
      outcome.report.best_heldout_loss = best;
      outcome.params = params;
      epochs_since_best = 0;
    } else {
      epochs_since_best += 1;
    }
    if (epochs_since_best >= config.patience) break;
  }
  return outcome;
}

}  // namespace cwm::train

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cwm/mine/negmine.hpp"
#include "cwm/model/scorer.hpp"
#include "cwm/train/losses.hpp"
#include "cwm/train/trainer.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/world/episode.hpp"

using namespace cwm;
using namespace cwm::train;

namespace {

std::vector<mine::TrainingInstance> tiny_dataset() {
  std::vector<world::EpisodeLog> logs;
  for (int variation : {0, 1}) {
    const std::uint64_t seed =
        util::derive_seed(util::derive_seed(7, "wave", 0), "boil",
                          static_cast<std::uint64_t>(variation));
    logs.push_back(world::run_episode(
        world::init_episode(world::Family::Boil, variation, seed)));
  }
  mine::MiningConfig config;
  return mine::mine_env_negatives(logs, config);
}

}  // namespace

TEST_CASE("infonce closed forms and limits") {
  const std::vector<double> uniform(16, 0.0);
  CHECK(infonce_loss(0.0, uniform, 0.6) ==
        doctest::Approx(std::log(17.0)).epsilon(1e-12));

  CHECK(infonce_loss(1.0, {0.0, -1.0}, 0.6) ==
        doctest::Approx(0.20263).epsilon(1e-4));

  CHECK(infonce_loss(50.0, {0.0, -1.0}, 0.6) ==
        doctest::Approx(0.0).epsilon(1e-9));

  // Monotone: raising the positive score never increases the loss.
  double prev = infonce_loss(-2.0, {0.0, 1.0}, 0.6);
  for (double pos = -1.5; pos <= 3.0; pos += 0.5) {
    const double cur = infonce_loss(pos, {0.0, 1.0}, 0.6);
    CHECK(cur <= prev);
    CHECK(cur >= 0.0);
    prev = cur;
  }
}

TEST_CASE("margin loss hinges on the mean negative") {
  CHECK(margin_loss(3.0, {1.0, 1.0}, 2.0) == 0.0);
  CHECK(margin_loss(1.0, {0.0, 2.0}, 2.0) == doctest::Approx(2.0));
  CHECK(margin_loss(1.0, {0.5}, 0.0) == 0.0);
  CHECK(margin_loss(0.0, {}, 2.0) == 0.0);
  CHECK(margin_loss(-5.0, {0.0}, 2.0) == doctest::Approx(7.0));
  CHECK(margin_loss(2.0 + 1e-9, {0.0}, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("numeric helpers are stable at extreme inputs") {
  CHECK(logsumexp({1000.0, 1000.0}) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));
  CHECK(std::isfinite(logsumexp({-1000.0, -1001.0})));
  CHECK(bce_with_logits(0.0, 1.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_with_logits(0.0, 0.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bce_with_logits(100.0, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::isfinite(bce_with_logits(-745.0, 0.0)));
  CHECK(sigmoid(0.0) == doctest::Approx(0.5));
  CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("the objective with both regularizers off is pure infonce") {
  const model::Vocabulary vocab = model::build_vocabulary();
  model::ScorerParams params = model::init_params(vocab, 16, 16, 42);
  for (double& x : params.theta) x *= 5.0;

  model::ScoredInstance inst;
  inst.state = "you are in the kitchen. you see: a pot containing water.";
  inst.positive = "heat the water";
  inst.negatives = {"cool the water", "open the pot"};

  model::LossConfig bare;
  bare.lambda_margin = 0.0;
  bare.lambda_reg = 0.0;
  const auto res = model::loss_and_gradients(params, inst, bare);

  const double pos = model::score(params, inst.state, inst.positive);
  std::vector<double> negs;
  for (const auto& n : inst.negatives) {
    negs.push_back(model::score(params, inst.state, n));
  }
  CHECK(res.total ==
        doctest::Approx(infonce_loss(pos, negs, bare.tau)).epsilon(1e-12));
}

TEST_CASE("doubling the parameters quadruples the penalty term") {
  const model::Vocabulary vocab = model::build_vocabulary();
  model::ScorerParams params = model::init_params(vocab, 8, 8, 1);
  model::ScorerParams doubled = params;
  for (double& x : doubled.theta) x *= 2.0;

  model::ScoredInstance inst;
  inst.state = "heat the water";
  inst.positive = "heat the water";
  inst.negatives = {"cool the water"};

  model::LossConfig config;
  const auto small = model::loss_and_gradients(params, inst, config);
  const auto big = model::loss_and_gradients(doubled, inst, config);
  CHECK(big.reg == doctest::Approx(4.0 * small.reg).epsilon(1e-12));
}

TEST_CASE("one optimizer step decreases the loss at a small rate") {
  const model::Vocabulary vocab = model::build_vocabulary();

  model::ScoredInstance inst;
  inst.state = "you are in the kitchen. you see: a pot containing water.";
  inst.positive = "heat the water";
  inst.negatives = {"cool the water", "open the pot", "eat the pot"};

  for (const model::LossMode mode : {model::LossMode::Cwm,
                                     model::LossMode::Sft}) {
    CAPTURE(model::to_string(mode));
    model::ScorerParams params = model::init_params(vocab, 16, 16, 5);
    model::LossConfig config;
    config.mode = mode;
    const auto before = model::loss_and_gradients(params, inst, config);

    AdamOptimizer opt(params.theta.size(), 1e-4, 0.9, 0.999, 1e-8);
    opt.update(params.theta, before.grad);
    CHECK(opt.steps() == 1);

    const auto after = model::loss_and_gradients(params, inst, config);
    CHECK(after.total < before.total);
  }
}

TEST_CASE("variation split sends 0-6 to train and 7-9 to heldout") {
  std::vector<world::EpisodeLog> logs;
  for (world::Family family : world::all_families()) {
    for (int v = 0; v <= 9; ++v) {
      world::EpisodeLog log;
      log.family = world::to_string(family);
      log.variation = v;
      logs.push_back(log);
    }
  }
  const EpisodeSplit split = split_by_variation(logs);
  CHECK(split.train.size() == 42);
  CHECK(split.heldout.size() == 18);
  for (const auto& log : split.train) CHECK(log.variation <= 6);
  for (const auto& log : split.heldout) CHECK(log.variation >= 7);
}

TEST_CASE("training config round-trips through json with pinned defaults") {
  const TrainConfig defaults;
  CHECK(defaults.tau == 0.6);
  CHECK(defaults.gamma == 2.0);
  CHECK(defaults.lambda_margin == 0.3);
  CHECK(defaults.lambda_reg == 0.005);
  CHECK(defaults.learning_rate == 1e-3);
  CHECK(defaults.epochs == 30);
  CHECK(defaults.patience == 7);
  CHECK(defaults.grad_accum == 16);
  CHECK(defaults.mode == "cwm");

  TrainConfig custom = defaults;
  custom.mode = "sft";
  custom.epochs = 3;
  custom.seed = 99;
  custom.lambda_reg = 0.0;
  const TrainConfig back = train_config_from_json(train_config_to_json(custom));
  CHECK(back.mode == custom.mode);
  CHECK(back.epochs == custom.epochs);
  CHECK(back.seed == custom.seed);
  CHECK(back.lambda_reg == custom.lambda_reg);
  CHECK(back.tau == custom.tau);
}

TEST_CASE("training is deterministic and obeys epoch accounting") {
  const auto data = tiny_dataset();
  REQUIRE(data.size() >= 16);

  TrainConfig config;
  config.epochs = 2;
  config.seed = 11;

  const TrainOutcome a = cwm::train::train(data, {}, config);
  const TrainOutcome b = cwm::train::train(data, {}, config);
  CHECK(a.params.theta == b.params.theta);
  CHECK(train_report_to_json(a.report) == train_report_to_json(b.report));
  CHECK(a.report.epochs.size() == 2);
  CHECK(a.report.train_instances == data.size());

  // The report tracks one heldout entry per epoch run.
  for (const EpochStats& e : a.report.epochs) {
    CHECK(std::isfinite(e.train_loss));
    CHECK(std::isfinite(e.heldout_loss));
  }
}

TEST_CASE("patience zero stops after exactly one epoch") {
  const auto data = tiny_dataset();
  TrainConfig config;
  config.epochs = 30;
  config.patience = 0;
  const TrainOutcome out = cwm::train::train(data, {}, config);
  CHECK(out.report.epochs.size() == 1);
  CHECK(out.report.best_epoch == 0);
}

TEST_CASE("the accumulation window size changes the optimization path") {
  const auto data = tiny_dataset();
  TrainConfig one;
  one.epochs = 1;
  one.grad_accum = 1;
  TrainConfig sixteen = one;
  sixteen.grad_accum = 16;
  const TrainOutcome a = cwm::train::train(data, {}, one);
  const TrainOutcome b = cwm::train::train(data, {}, sixteen);
  CHECK(a.params.theta != b.params.theta);
}

TEST_CASE("training loss falls from the first epoch on a small dataset") {
  const auto data = tiny_dataset();
  TrainConfig config;
  config.epochs = 10;
  config.patience = 10;
  const TrainOutcome out = cwm::train::train(data, {}, config);
  REQUIRE(out.report.epochs.size() >= 2);
  CHECK(out.report.epochs.back().train_loss <
        out.report.epochs.front().train_loss);
}

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cwm/model/scorer.hpp"
#include "cwm/model/vocab.hpp"
#include "cwm/util/io.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/world/episode.hpp"

using namespace cwm;
using namespace cwm::model;

namespace {

ScorerParams zero_params(int embed_dim, int hidden_dim) {
  ScorerParams p;
  p.embed_dim = embed_dim;
  p.hidden_dim = hidden_dim;
  p.vocab = build_vocabulary();
  p.theta.assign(p.param_count(), 0.0);
  return p;
}

ScoredInstance uniform_instance(int negatives) {
  ScoredInstance inst;
  inst.state = "you are in the kitchen.";
  inst.positive = "heat the water";
  for (int i = 0; i < negatives; ++i) {
    inst.negatives.push_back("cool the water " + std::to_string(i));
  }
  return inst;
}

double finite_difference(const ScorerParams& params,
                         const ScoredInstance& inst, const LossConfig& config,
                         std::size_t k, double step) {
  ScorerParams hi = params;
  ScorerParams lo = params;
  hi.theta[k] += step;
  lo.theta[k] -= step;
  const double up = loss_and_gradients(hi, inst, config).total;
  const double down = loss_and_gradients(lo, inst, config).total;
  return (up - down) / (2.0 * step);
}

}  // namespace

TEST_CASE("vocabulary is deterministic, sorted, and unknown-rooted") {
  const Vocabulary a = build_vocabulary();
  const Vocabulary b = build_vocabulary();
  CHECK(a == b);
  REQUIRE(a.size() > 1);
  CHECK(a.tokens[0] == std::string(kUnknownToken));
  for (std::size_t i = 2; i < a.tokens.size(); ++i) {
    CHECK(a.tokens[i - 1] < a.tokens[i]);
  }
  CHECK(a.id_of("florbnitz") == 0);
  CHECK(a.id_of("water") > 0);
  CHECK(encode(a, "Heat the WATER!") ==
        std::vector<int>{a.id_of("heat"), a.id_of("the"), a.id_of("water")});
  CHECK(encode(a, "") == std::vector<int>{0});
}

TEST_CASE("every rendered prompt and candidate stays in-vocabulary") {
  const Vocabulary vocab = build_vocabulary();
  for (world::Family family : world::all_families()) {
    const std::uint64_t seed =
        util::derive_seed(util::derive_seed(7, "wave", 0),
                          world::to_string(family), 9);
    const world::EpisodeLog log =
        world::run_episode(world::init_episode(family, 9, seed));
    for (const world::StepRecord& rec : log.steps) {
      for (int id : encode(vocab, rec.state_prompt)) CHECK(id != 0);
      for (const world::Candidate& cand : rec.candidates) {
        for (int id : encode(vocab, cand.action.surface)) CHECK(id != 0);
      }
    }
  }
}

TEST_CASE("initialization is seeded, bounded, and zero-biased") {
  const Vocabulary vocab = build_vocabulary();
  const ScorerParams a = init_params(vocab, 64, 64, 7);
  const ScorerParams b = init_params(vocab, 64, 64, 7);
  const ScorerParams c = init_params(vocab, 64, 64, 8);
  CHECK(a.theta == b.theta);
  CHECK(a.theta != c.theta);
  REQUIRE(a.theta.size() == a.param_count());

  for (std::size_t k = a.off_embeddings(); k < a.off_state_b(); ++k) {
    CHECK(std::fabs(a.theta[k]) < 0.1);
  }
  for (std::size_t k = a.off_state_b(); k < a.off_action_w(); ++k) {
    CHECK(a.theta[k] == 0.0);  // state bias
  }
  for (std::size_t k = a.off_action_b(); k < a.off_interaction(); ++k) {
    CHECK(a.theta[k] == 0.0);  // action bias
  }
  CHECK(a.theta[a.off_bias()] == 0.0);
}

TEST_CASE("scores at initialization are finite and small") {
  const Vocabulary vocab = build_vocabulary();
  const ScorerParams params = init_params(vocab, 64, 64, 123);
  util::Rng rng(5);
  const std::vector<std::string> words = {"water", "pot",  "stove", "heat",
                                          "cool",  "open", "the",   "pan"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string state, action;
    for (int i = 0; i < 12; ++i) {
      state += words[rng.below(words.size())] + " ";
    }
    for (int i = 0; i < 4; ++i) {
      action += words[rng.below(words.size())] + " ";
    }
    const double s = score(params, state, action);
    CHECK(std::isfinite(s));
    CHECK(std::fabs(s) < 10.0);
  }
}

TEST_CASE("scoring is pure and repeatable") {
  const Vocabulary vocab = build_vocabulary();
  const ScorerParams params = init_params(vocab, 16, 16, 3);
  const std::vector<double> before = params.theta;
  const double s1 = score(params, "heat the water", "cool the water");
  const double s2 = score(params, "heat the water", "cool the water");
  CHECK(s1 == s2);
  CHECK(params.theta == before);
}

TEST_CASE("mean pooling makes token repetition a no-op") {
  const Vocabulary vocab = build_vocabulary();
  const ScorerParams params = init_params(vocab, 32, 32, 9);
  CHECK(score(params, "water water water", "heat heat") ==
        doctest::Approx(score(params, "water", "heat")).epsilon(1e-12));
}

TEST_CASE("zero parameters give the closed-form losses") {
  const ScorerParams params = zero_params(64, 64);
  const ScoredInstance inst = uniform_instance(16);

  LossConfig cwm;  // defaults: tau 0.6, gamma 2.0, lambda_m 0.3, lambda_r 5e-3
  const LossResult res = loss_and_gradients(params, inst, cwm);
  CHECK(res.contrastive == doctest::Approx(std::log(17.0)).epsilon(1e-12));
  CHECK(res.margin == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(res.reg == 0.0);
  CHECK(res.total ==
        doctest::Approx(std::log(17.0) + 0.6).epsilon(1e-12));

  LossConfig sft;
  sft.mode = LossMode::Sft;
  const LossResult bce = loss_and_gradients(params, inst, sft);
  CHECK(bce.contrastive == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // All scores zero means a zero score for any input.
  CHECK(score(params, "anything at all", "whatever") == 0.0);
}

TEST_CASE("a two-dimensional fixture matches the closed-form score") {
  // Vocabulary of the fixture: ids resolved through the real tokenizer.
  Vocabulary vocab = vocabulary_from_tokens({"<unk>", "cold", "hot"});
  ScorerParams p;
  p.embed_dim = 2;
  p.hidden_dim = 2;
  p.vocab = vocab;
  p.theta.assign(p.param_count(), 0.0);

  const int hot = vocab.id_of("hot");
  const int cold = vocab.id_of("cold");
  REQUIRE(hot > 0);
  REQUIRE(cold > 0);

  // emb(hot) = (0.3, -0.1), emb(cold) = (-0.2, 0.4)
  p.theta[p.off_embeddings() + 2 * hot + 0] = 0.3;
  p.theta[p.off_embeddings() + 2 * hot + 1] = -0.1;
  p.theta[p.off_embeddings() + 2 * cold + 0] = -0.2;
  p.theta[p.off_embeddings() + 2 * cold + 1] = 0.4;
  // A = [[1, 2], [-1, 0.5]], a = (0.05, -0.05)   (row-major h x d)
  p.theta[p.off_state_w() + 0] = 1.0;
  p.theta[p.off_state_w() + 1] = 2.0;
  p.theta[p.off_state_w() + 2] = -1.0;
  p.theta[p.off_state_w() + 3] = 0.5;
  p.theta[p.off_state_b() + 0] = 0.05;
  p.theta[p.off_state_b() + 1] = -0.05;
  // B = [[0.5, -0.5], [1.5, 0.25]], b = (-0.1, 0.2)
  p.theta[p.off_action_w() + 0] = 0.5;
  p.theta[p.off_action_w() + 1] = -0.5;
  p.theta[p.off_action_w() + 2] = 1.5;
  p.theta[p.off_action_w() + 3] = 0.25;
  p.theta[p.off_action_b() + 0] = -0.1;
  p.theta[p.off_action_b() + 1] = 0.2;
  // W = [[2, -1], [0.5, 1]], c = 0.25
  p.theta[p.off_interaction() + 0] = 2.0;
  p.theta[p.off_interaction() + 1] = -1.0;
  p.theta[p.off_interaction() + 2] = 0.5;
  p.theta[p.off_interaction() + 3] = 1.0;
  p.theta[p.off_bias()] = 0.25;

  // State "hot cold" mean-pools the two embeddings; action is "hot".
  const double s0 = (0.3 + -0.2) / 2.0;
  const double s1 = (-0.1 + 0.4) / 2.0;
  const double u0 = std::tanh(1.0 * s0 + 2.0 * s1 + 0.05);
  const double u1 = std::tanh(-1.0 * s0 + 0.5 * s1 - 0.05);
  const double v0 = std::tanh(0.5 * 0.3 - 0.5 * -0.1 - 0.1);
  const double v1 = std::tanh(1.5 * 0.3 + 0.25 * -0.1 + 0.2);
  const double expected = u0 * (2.0 * v0 - 1.0 * v1) +
                          u1 * (0.5 * v0 + 1.0 * v1) + 0.25;

  CHECK(score(p, "hot cold", "hot") ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("analytic gradients match finite differences") {
  const Vocabulary vocab = build_vocabulary();
  util::Rng rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    ScorerParams params = init_params(vocab, 8, 8, 100 + trial);
    // Scale up so tanh nonlinearity and the margin hinge both engage.
    for (double& x : params.theta) x *= 3.0;

    ScoredInstance inst;
    inst.state = "you are in the kitchen. you see: a pot containing water.";
    inst.positive = "heat the water";
    inst.negatives = {"cool the water", "open the pot", "eat the pot",
                      "go to the kitchen"};

    LossConfig config;
    config.mode = (trial % 2 == 0) ? LossMode::Cwm : LossMode::Sft;
    const LossResult res = loss_and_gradients(params, inst, config);
    REQUIRE(res.grad.size() == params.theta.size());

    double max_rel = 0.0;
    // Exhaustive over the non-embedding tail; embeddings sampled.
    for (std::size_t k = params.off_state_w(); k < params.param_count();
         ++k) {
      const double fd = finite_difference(params, inst, config, k, 1e-4);
      const double denom =
          std::max({std::fabs(fd), std::fabs(res.grad[k]), 1e-6});
      max_rel = std::max(max_rel, std::fabs(res.grad[k] - fd) / denom);
    }
    for (int draw = 0; draw < 200; ++draw) {
      const std::size_t k = rng.below(params.off_state_w());
      const double fd = finite_difference(params, inst, config, k, 1e-4);
      const double denom =
          std::max({std::fabs(fd), std::fabs(res.grad[k]), 1e-6});
      max_rel = std::max(max_rel, std::fabs(res.grad[k] - fd) / denom);
    }
    CHECK(max_rel <= 1e-4);
  }
}

TEST_CASE("checkpoints round-trip bit for bit") {
  const Vocabulary vocab = build_vocabulary();
  const ScorerParams params = init_params(vocab, 64, 64, 2024);
  const auto dir = std::filesystem::temp_directory_path() / "cwm_model_tests";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "probe.ckpt").string();

  save_checkpoint(params, path);
  const ScorerParams back = load_checkpoint(path);
  CHECK(back.embed_dim == params.embed_dim);
  CHECK(back.hidden_dim == params.hidden_dim);
  CHECK(back.vocab == params.vocab);
  CHECK(back.theta == params.theta);

  CHECK(score(back, "heat the water", "cool the water") ==
        score(params, "heat the water", "cool the water"));

  // The header is a single JSON line.
  const std::string bytes = util::read_file(path);
  const auto newline = bytes.find('\n');
  REQUIRE(newline != std::string::npos);
  const auto header = nlohmann::json::parse(bytes.substr(0, newline));
  CHECK(header.contains("schema_version"));
  CHECK(header["embed_dim"] == 64);

  // Saving again produces identical bytes.
  const std::string path2 = (dir / "probe2.ckpt").string();
  save_checkpoint(params, path2);
  CHECK(util::read_file(path2) == bytes);
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("loss modes parse from their names") {
  CHECK(loss_mode_from_string("cwm") == LossMode::Cwm);
  CHECK(loss_mode_from_string("sft") == LossMode::Sft);
  CHECK(std::string(to_string(LossMode::Cwm)) == "cwm");
  CHECK(std::string(to_string(LossMode::Sft)) == "sft");
  CHECK_THROWS(loss_mode_from_string("other"));
}

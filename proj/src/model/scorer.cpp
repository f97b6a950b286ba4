#include "cwm/model/scorer.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "cwm/train/losses.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/version.hpp"

namespace cwm::model {

namespace {

struct TowerOut {
  std::vector<int> ids;
  std::vector<double> pooled;  // mean embedding, length d
  std::vector<double> act;     // tanh output, length h
};

TowerOut run_tower(const ScorerParams& p, std::size_t off_w, std::size_t off_b,
                   const std::string& text) {
  const int d = p.embed_dim;
  const int h = p.hidden_dim;
  TowerOut t;
  t.ids = encode(p.vocab, text);
  t.pooled.assign(static_cast<std::size_t>(d), 0.0);
  if (!t.ids.empty()) {
    for (int id : t.ids) {
      const double* row =
          p.theta.data() + p.off_embeddings() +
          static_cast<std::size_t>(id) * static_cast<std::size_t>(d);
      for (int j = 0; j < d; ++j) t.pooled[static_cast<std::size_t>(j)] += row[j];
    }
    const double inv = 1.0 / static_cast<double>(t.ids.size());
    for (double& x : t.pooled) x *= inv;
  }
  t.act.assign(static_cast<std::size_t>(h), 0.0);
  for (int i = 0; i < h; ++i) {
    const double* row = p.theta.data() + off_w +
                        static_cast<std::size_t>(i) * static_cast<std::size_t>(d);
    double pre = p.theta[off_b + static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j) pre += row[j] * t.pooled[static_cast<std::size_t>(j)];
    t.act[static_cast<std::size_t>(i)] = std::tanh(pre);
  }
  return t;
}

double bilinear(const ScorerParams& p, const std::vector<double>& u,
                const std::vector<double>& v) {
  const int h = p.hidden_dim;
  double s = p.theta[p.off_bias()];
  for (int i = 0; i < h; ++i) {
    const double* row = p.theta.data() + p.off_interaction() +
                        static_cast<std::size_t>(i) * static_cast<std::size_t>(h);
    double acc = 0.0;
    for (int j = 0; j < h; ++j) acc += row[j] * v[static_cast<std::size_t>(j)];
    s += u[static_cast<std::size_t>(i)] * acc;
  }
  return s;
}

/// Backpropagates d(loss)/d(act) through one tower into the gradient
/// vector: the affine map, then mean pooling into the embedding rows.
void tower_backward(const ScorerParams& p, std::size_t off_w, std::size_t off_b,
                    const TowerOut& t, const std::vector<double>& dact,
                    std::vector<double>& grad) {
  const int d = p.embed_dim;
  const int h = p.hidden_dim;
  std::vector<double> dpre(static_cast<std::size_t>(h));
  for (int i = 0; i < h; ++i) {
    const double a = t.act[static_cast<std::size_t>(i)];
    dpre[static_cast<std::size_t>(i)] =
        dact[static_cast<std::size_t>(i)] * (1.0 - a * a);
  }
  std::vector<double> dpooled(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < h; ++i) {
    const double g = dpre[static_cast<std::size_t>(i)];
    const std::size_t row = off_w + static_cast<std::size_t>(i) *
                                        static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) {
      grad[row + static_cast<std::size_t>(j)] +=
          g * t.pooled[static_cast<std::size_t>(j)];
      dpooled[static_cast<std::size_t>(j)] +=
          g * p.theta[row + static_cast<std::size_t>(j)];
    }
    grad[off_b + static_cast<std::size_t>(i)] += g;
  }
  if (t.ids.empty()) return;
  const double inv = 1.0 / static_cast<double>(t.ids.size());
  for (int id : t.ids) {
    const std::size_t row = p.off_embeddings() +
                            static_cast<std::size_t>(id) *
                                static_cast<std::size_t>(d);
    for (int j = 0; j < d; ++j) {
      grad[row + static_cast<std::size_t>(j)] +=
          inv * dpooled[static_cast<std::size_t>(j)];
    }
  }
}

void append_le_doubles(std::string& out, const std::vector<double>& xs) {
  for (double x : xs) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int b = 0; b < 8; ++b) {
      out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
}

}  // namespace

LossMode loss_mode_from_string(const std::string& name) {
  if (name == "cwm") return LossMode::Cwm;
  if (name == "sft") return LossMode::Sft;
  throw std::invalid_argument("unknown loss mode: " + name);
}

const char* to_string(LossMode mode) {
  return mode == LossMode::Cwm ? "cwm" : "sft";
}

ScorerParams init_params(const Vocabulary& vocab, int embed_dim,
                         int hidden_dim, std::uint64_t seed) {
  ScorerParams p;
  p.embed_dim = embed_dim;
  p.hidden_dim = hidden_dim;
  p.vocab = vocab;
  p.theta.assign(p.param_count(), 0.0);

  util::Rng rng(util::derive_seed(seed, "scorer_init"));
  const auto fill = [&](std::size_t off, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
      p.theta[off + i] = rng.uniform(-0.1, 0.1);
    }
  };
  const auto d = static_cast<std::size_t>(embed_dim);
  const auto h = static_cast<std::size_t>(hidden_dim);
  fill(p.off_embeddings(), p.vocab_size() * d);
  fill(p.off_state_w(), h * d);
  fill(p.off_action_w(), h * d);
  fill(p.off_interaction(), h * h);
  // state_b, action_b, and the scalar bias stay zero.
  return p;
}

double score(const ScorerParams& p, const std::string& state_text,
             const std::string& action_text) {
  const TowerOut u = run_tower(p, p.off_state_w(), p.off_state_b(), state_text);
  const TowerOut v =
      run_tower(p, p.off_action_w(), p.off_action_b(), action_text);
  return bilinear(p, u.act, v.act);
}

LossResult loss_and_gradients(const ScorerParams& p,
                              const ScoredInstance& instance,
                              const LossConfig& config) {
  const int h = p.hidden_dim;
  const std::size_t n_negs = instance.negatives.size();

  const TowerOut state_tower =
      run_tower(p, p.off_state_w(), p.off_state_b(), instance.state);
  std::vector<TowerOut> action_towers;
  action_towers.reserve(n_negs + 1);
  action_towers.push_back(
      run_tower(p, p.off_action_w(), p.off_action_b(), instance.positive));
  for (const std::string& neg : instance.negatives) {
    action_towers.push_back(
        run_tower(p, p.off_action_w(), p.off_action_b(), neg));
  }

  std::vector<double> scores(action_towers.size());
  for (std::size_t k = 0; k < action_towers.size(); ++k) {
    scores[k] = bilinear(p, state_tower.act, action_towers[k].act);
  }
  const double pos = scores[0];
  const std::vector<double> negs(scores.begin() + 1, scores.end());

  LossResult result;
  std::vector<double> dscore(scores.size(), 0.0);

  if (config.mode == LossMode::Cwm) {
    result.contrastive = train::infonce_loss(pos, negs, config.tau);
    // Softmax over [pos, negs] at temperature tau.
    std::vector<double> z(scores.size());
    for (std::size_t k = 0; k < scores.size(); ++k) z[k] = scores[k] / config.tau;
    const double lse = train::logsumexp(z);
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const double prob = std::exp(z[k] - lse);
      dscore[k] += prob / config.tau;
    }
    dscore[0] -= 1.0 / config.tau;

    result.margin = train::margin_loss(pos, negs, config.gamma);
    if (!negs.empty() && result.margin > 0.0) {
      dscore[0] -= config.lambda_margin;
      for (std::size_t k = 1; k < scores.size(); ++k) {
        dscore[k] += config.lambda_margin / static_cast<double>(n_negs);
      }
    }
    result.total = result.contrastive + config.lambda_margin * result.margin;
  } else {
    const double count = static_cast<double>(scores.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
      const double label = k == 0 ? 1.0 : 0.0;
      sum += train::bce_with_logits(scores[k], label);
      dscore[k] = (train::sigmoid(scores[k]) - label) / count;
    }
    result.contrastive = sum / count;
    result.total = result.contrastive;
  }

  result.grad.assign(p.param_count(), 0.0);
  std::vector<double> du(static_cast<std::size_t>(h), 0.0);
  for (std::size_t k = 0; k < action_towers.size(); ++k) {
    const double g = dscore[k];
    if (g == 0.0) continue;
    const std::vector<double>& u = state_tower.act;
    const std::vector<double>& v = action_towers[k].act;
    std::vector<double> dv(static_cast<std::size_t>(h), 0.0);
    for (int i = 0; i < h; ++i) {
      const std::size_t row = p.off_interaction() +
                              static_cast<std::size_t>(i) *
                                  static_cast<std::size_t>(h);
      for (int j = 0; j < h; ++j) {
        result.grad[row + static_cast<std::size_t>(j)] +=
            g * u[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
        dv[static_cast<std::size_t>(j)] +=
            g * p.theta[row + static_cast<std::size_t>(j)] *
            u[static_cast<std::size_t>(i)];
        du[static_cast<std::size_t>(i)] +=
            g * p.theta[row + static_cast<std::size_t>(j)] *
            v[static_cast<std::size_t>(j)];
      }
    }
    result.grad[p.off_bias()] += g;
    tower_backward(p, p.off_action_w(), p.off_action_b(), action_towers[k], dv,
                   result.grad);
  }
  tower_backward(p, p.off_state_w(), p.off_state_b(), state_tower, du,
                 result.grad);

  // L2 over every parameter, biases included.
  double sq = 0.0;
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    sq += p.theta[i] * p.theta[i];
    result.grad[i] += 2.0 * config.lambda_reg * p.theta[i];
  }
  result.reg = config.lambda_reg * sq;
  result.total += result.reg;
  return result;
}

void save_checkpoint(const ScorerParams& p, const std::string& path) {
  nlohmann::json header = {
      {"schema_version", kSchemaVersion},
      {"embed_dim", p.embed_dim},
      {"hidden_dim", p.hidden_dim},
      {"vocabulary", p.vocab.tokens},
  };
  std::string out = header.dump();
  out.push_back('\n');
  append_le_doubles(out, p.theta);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write checkpoint: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("checkpoint write failed: " + path);
}

ScorerParams load_checkpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string header_line;
  if (!std::getline(file, header_line)) {
    throw std::runtime_error("checkpoint missing header: " + path);
  }
  const nlohmann::json header = nlohmann::json::parse(header_line);
  if (header.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("checkpoint schema version mismatch: " + path);
  }

  ScorerParams p;
  p.embed_dim = header.at("embed_dim").get<int>();
  p.hidden_dim = header.at("hidden_dim").get<int>();
  p.vocab = vocabulary_from_tokens(
      header.at("vocabulary").get<std::vector<std::string>>());
  p.theta.assign(p.param_count(), 0.0);

  std::string body((std::istreambuf_iterator<char>(file)),
                   std::istreambuf_iterator<char>());
  if (body.size() != p.param_count() * 8) {
    throw std::runtime_error("checkpoint tensor size mismatch: " + path);
  }
  for (std::size_t i = 0; i < p.theta.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 7; b >= 0; --b) {
      bits = (bits << 8) |
             static_cast<unsigned char>(body[i * 8 + static_cast<std::size_t>(b)]);
    }
    p.theta[i] = std::bit_cast<double>(bits);
  }
  return p;
}

}  // namespace cwm::model

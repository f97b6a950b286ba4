#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cwm/model/vocab.hpp"

namespace cwm::model {

/// Two-tower bilinear scorer. Each tower mean-pools token embeddings and
/// applies an affine map with tanh; the towers meet in a bilinear form:
///
///   u = tanh(A.pool(state) + a), v = tanh(B.pool(action) + b)
///   score = u^T W v + c
///
/// All parameters live in one flat vector in checkpoint order:
/// embeddings, state_w, state_b, action_w, action_b, interaction, bias.
struct ScorerParams {
  int embed_dim = 64;
  int hidden_dim = 64;
  Vocabulary vocab;
  std::vector<double> theta;

  std::size_t vocab_size() const { return vocab.size(); }
  std::size_t off_embeddings() const { return 0; }
  std::size_t off_state_w() const {
    return vocab_size() * static_cast<std::size_t>(embed_dim);
  }
  std::size_t off_state_b() const {
    return off_state_w() +
           static_cast<std::size_t>(hidden_dim) * embed_dim;
  }
  std::size_t off_action_w() const {
    return off_state_b() + static_cast<std::size_t>(hidden_dim);
  }
  std::size_t off_action_b() const {
    return off_action_w() +
           static_cast<std::size_t>(hidden_dim) * embed_dim;
  }
  std::size_t off_interaction() const {
    return off_action_b() + static_cast<std::size_t>(hidden_dim);
  }
  std::size_t off_bias() const {
    return off_interaction() +
           static_cast<std::size_t>(hidden_dim) * hidden_dim;
  }
  std::size_t param_count() const { return off_bias() + 1; }
};

/// Weight matrices and embeddings start uniform in (-0.1, 0.1); biases
/// start at zero. Identical seeds give identical parameters.
ScorerParams init_params(const Vocabulary& vocab, int embed_dim,
                         int hidden_dim, std::uint64_t seed);

double score(const ScorerParams& params, const std::string& state_text,
             const std::string& action_text);

/// One contrastive instance reduced to raw text.
struct ScoredInstance {
  std::string state;
  std::string positive;
  std::vector<std::string> negatives;
};

enum class LossMode { Cwm, Sft };
LossMode loss_mode_from_string(const std::string& name);
const char* to_string(LossMode mode);

struct LossConfig {
  LossMode mode = LossMode::Cwm;
  double tau = 0.6;
  double gamma = 2.0;
  double lambda_margin = 0.3;
  double lambda_reg = 0.005;
};

struct LossResult {
  double total = 0.0;
  double contrastive = 0.0;  // InfoNCE (cwm) or mean BCE (sft)
  double margin = 0.0;
  double reg = 0.0;
  std::vector<double> grad;  // same layout as ScorerParams::theta
};

/// Loss and full analytic gradient for a single instance. The gradient
/// covers every parameter, including the L2 term (the regularizer is
/// part of the loss, not folded into the optimizer update).
LossResult loss_and_gradients(const ScorerParams& params,
                              const ScoredInstance& instance,
                              const LossConfig& config);

void save_checkpoint(const ScorerParams& params, const std::string& path);
ScorerParams load_checkpoint(const std::string& path);

}  // namespace cwm::model

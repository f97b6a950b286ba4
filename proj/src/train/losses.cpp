#include "cwm/train/losses.hpp"

#include <algorithm>
#include <cmath>

namespace cwm::train {

double softplus(double x) {
  return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logsumexp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - m);
  return m + std::log(sum);
}

double infonce_loss(double pos, const std::vector<double>& negs, double tau) {
  std::vector<double> logits;
  logits.reserve(negs.size() + 1);
  logits.push_back(pos / tau);
  for (double n : negs) logits.push_back(n / tau);
  return logsumexp(logits) - pos / tau;
}

double margin_loss(double pos, const std::vector<double>& negs, double gamma) {
  if (negs.empty()) return 0.0;
  double mean = 0.0;
  for (double n : negs) mean += n;
  mean /= static_cast<double>(negs.size());
  return std::max(0.0, gamma - pos + mean);
}

double bce_with_logits(double logit, double label) {
  return softplus(logit) - label * logit;
}

}  // namespace cwm::train

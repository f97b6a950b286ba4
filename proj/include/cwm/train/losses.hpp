#pragma once

#include <vector>

namespace cwm::train {

double softplus(double x);
double sigmoid(double x);

/// Stable log(sum(exp(xs))) with max subtraction.
double logsumexp(const std::vector<double>& xs);

/// InfoNCE with the positive in the numerator and positive-plus-
/// negatives in the denominator, at temperature tau:
///   -log( exp(pos/tau) / (exp(pos/tau) + sum_i exp(neg_i/tau)) )
double infonce_loss(double pos, const std::vector<double>& negs, double tau);

/// Hinge on the gap between the positive and the mean negative:
///   max(0, gamma - pos + mean(negs));  zero when there are no negatives.
double margin_loss(double pos, const std::vector<double>& negs, double gamma);

/// Binary cross-entropy on a logit, in softplus form:
///   softplus(logit) - label * logit
double bce_with_logits(double logit, double label);

}  // namespace cwm::train

#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace cwm::eval {

/// Scores for one ranking instance: the gold action against its
/// negatives.
struct RankedInstance {
  double pos = 0.0;
  std::vector<double> negs;
};

/// Pessimistic competition rank of the positive: 1 + strictly-better
/// negatives + tied negatives. A tie can never inflate the result.
int pessimistic_rank(double pos, const std::vector<double>& negs);

double precision_at_1(const std::vector<int>& ranks);
double mean_reciprocal_rank(const std::vector<int>& ranks);

/// Probability that a random positive outscores a random negative, ties
/// counting half. Computed by rank-sum over the pooled scores; agrees
/// exactly with the all-pairs definition.
double auc(const std::vector<double>& pos_scores,
           const std::vector<double>& neg_scores);

/// Mean over instances of (positive score - mean negative score).
double mean_score_gap(const std::vector<RankedInstance>& instances);

struct MetricBundle {
  double p_at_1 = 0.0;
  double mrr = 0.0;
  double auc = 0.0;
  double score_gap = 0.0;
  std::size_t instances = 0;
};

MetricBundle compute_metrics(const std::vector<RankedInstance>& instances);
nlohmann::json metric_bundle_to_json(const MetricBundle& bundle);
MetricBundle metric_bundle_from_json(const nlohmann::json& j);

/// One teacher-forced filter step: the gold action's score against every
/// other candidate at that state.
struct FilterRecord {
  double gold_score = 0.0;
  std::vector<double> other_scores;
  bool excluded = false;  // gold matcher failed; kept out of rank metrics
};

int filter_rank(const FilterRecord& record);

/// Gold-action retention rate: fraction of non-excluded records whose
/// gold rank is at most k.
double garr_at_k(const std::vector<FilterRecord>& records, int k);

/// Mean over non-excluded records of (gold score - best other score).
double mean_safety_margin(const std::vector<FilterRecord>& records);

double exclusion_rate(const std::vector<FilterRecord>& records);

/// Fuzzy gold matcher: finds the candidate realizing the gold action.
/// Cascade on article-stripped lowercase token forms: exact match, then
/// token-set Jaccard >= 0.8, then normalized character Levenshtein
/// similarity >= 0.85. Ties resolve to the lowest index; no stage
/// matching means no match.
std::optional<std::size_t> match_gold(const std::vector<std::string>& candidates,
                                      const std::string& gold);

/// Similarity helpers exposed for characterization.
std::string normalize_surface(const std::string& text);
double token_set_jaccard(const std::string& a, const std::string& b);
double levenshtein_similarity(const std::string& a, const std::string& b);

}  // namespace cwm::eval

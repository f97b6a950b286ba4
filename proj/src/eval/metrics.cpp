#include "cwm/eval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cwm/util/text.hpp"

namespace cwm::eval {

int pessimistic_rank(double pos, const std::vector<double>& negs) {
  int rank = 1;
  for (double n : negs) {
    if (n >= pos) rank += 1;
  }
  return rank;
}

double precision_at_1(const std::vector<int>& ranks) {
  if (ranks.empty()) return 0.0;
  std::size_t hits = 0;
  for (int r : ranks) {
    if (r == 1) hits += 1;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mean_reciprocal_rank(const std::vector<int>& ranks) {
  if (ranks.empty()) return 0.0;
  double sum = 0.0;
  for (int r : ranks) sum += 1.0 / static_cast<double>(r);
  return sum / static_cast<double>(ranks.size());
}

double auc(const std::vector<double>& pos_scores,
           const std::vector<double>& neg_scores) {
  if (pos_scores.empty() || neg_scores.empty()) {
    throw std::invalid_argument("auc needs both positive and negative scores");
  }
  // Pool and mid-rank: the rank-sum of positives relates to the number
  // of (pos > neg) pairs with ties counted half, exactly the all-pairs
  // statistic.
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> pooled;
  pooled.reserve(pos_scores.size() + neg_scores.size());
  for (double s : pos_scores) pooled.push_back({s, true});
  for (double s : neg_scores) pooled.push_back({s, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].score == pooled[i].score) j += 1;
    const double mid_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].positive) rank_sum_pos += mid_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos_scores.size());
  const double n = static_cast<double>(neg_scores.size());
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

double mean_score_gap(const std::vector<RankedInstance>& instances) {
  if (instances.empty()) return 0.0;
  double sum = 0.0;
  for (const RankedInstance& inst : instances) {
    if (inst.negs.empty()) continue;
    const double mean_neg =
        std::accumulate(inst.negs.begin(), inst.negs.end(), 0.0) /
        static_cast<double>(inst.negs.size());
    sum += inst.pos - mean_neg;
  }
  return sum / static_cast<double>(instances.size());
}

MetricBundle compute_metrics(const std::vector<RankedInstance>& instances) {
  MetricBundle bundle;
  bundle.instances = instances.size();
  if (instances.empty()) return bundle;

  std::vector<int> ranks;
  std::vector<double> pos_scores;
  std::vector<double> neg_scores;
  for (const RankedInstance& inst : instances) {
    ranks.push_back(pessimistic_rank(inst.pos, inst.negs));
    pos_scores.push_back(inst.pos);
    for (double n : inst.negs) neg_scores.push_back(n);
  }
  bundle.p_at_1 = precision_at_1(ranks);
  bundle.mrr = mean_reciprocal_rank(ranks);
  bundle.auc = neg_scores.empty() ? 0.0 : auc(pos_scores, neg_scores);
  bundle.score_gap = mean_score_gap(instances);
  return bundle;
}

nlohmann::json metric_bundle_to_json(const MetricBundle& b) {
  return {{"p_at_1", b.p_at_1},
          {"mrr", b.mrr},
          {"auc", b.auc},
          {"score_gap", b.score_gap},
          {"instances", b.instances}};
}

MetricBundle metric_bundle_from_json(const nlohmann::json& j) {
  MetricBundle b;
  b.p_at_1 = j.at("p_at_1").get<double>();
  b.mrr = j.at("mrr").get<double>();
  b.auc = j.at("auc").get<double>();
  b.score_gap = j.at("score_gap").get<double>();
  b.instances = j.at("instances").get<std::size_t>();
  return b;
}

int filter_rank(const FilterRecord& record) {
  return pessimistic_rank(record.gold_score, record.other_scores);
}

double garr_at_k(const std::vector<FilterRecord>& records, int k) {
  std::size_t kept = 0;
  std::size_t within = 0;
  for (const FilterRecord& r : records) {
    if (r.excluded) continue;
    kept += 1;
    if (filter_rank(r) <= k) within += 1;
  }
  if (kept == 0) return 0.0;
  return static_cast<double>(within) / static_cast<double>(kept);
}

double mean_safety_margin(const std::vector<FilterRecord>& records) {
  std::size_t kept = 0;
  double sum = 0.0;
  for (const FilterRecord& r : records) {
    if (r.excluded || r.other_scores.empty()) continue;
    kept += 1;
    sum += r.gold_score -
           *std::max_element(r.other_scores.begin(), r.other_scores.end());
  }
  if (kept == 0) return 0.0;
  return sum / static_cast<double>(kept);
}

double exclusion_rate(const std::vector<FilterRecord>& records) {
  if (records.empty()) return 0.0;
  std::size_t excluded = 0;
  for (const FilterRecord& r : records) {
    if (r.excluded) excluded += 1;
  }
  return static_cast<double>(excluded) / static_cast<double>(records.size());
}

namespace {

std::vector<std::string> normalized_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  for (const std::string& tok : util::split_tokens(text)) {
    if (tok == "a" || tok == "an" || tok == "the") continue;
    tokens.push_back(tok);
  }
  return tokens;
}

std::size_t levenshtein_distance(const std::string& a, const std::string& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

std::string normalize_surface(const std::string& text) {
  return util::join(normalized_tokens(text), " ");
}

double token_set_jaccard(const std::string& a, const std::string& b) {
  const auto ta = normalized_tokens(a);
  const auto tb = normalized_tokens(b);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const std::string& t : sa) inter += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double levenshtein_similarity(const std::string& a, const std::string& b) {
  const std::string na = normalize_surface(a);
  const std::string nb = normalize_surface(b);
  const std::size_t longest = std::max(na.size(), nb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein_distance(na, nb)) /
                   static_cast<double>(longest);
}

std::optional<std::size_t> match_gold(
    const std::vector<std::string>& candidates, const std::string& gold) {
  const std::string norm_gold = normalize_surface(gold);

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (normalize_surface(candidates[i]) == norm_gold) return i;
  }

  constexpr double kJaccardThreshold = 0.8;
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = token_set_jaccard(candidates[i], gold);
    if (s >= kJaccardThreshold && s > best_score) {
      best = i;
      best_score = s;
    }
  }
  if (best.has_value()) return best;

  constexpr double kLevenshteinThreshold = 0.85;
  best_score = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double s = levenshtein_similarity(candidates[i], gold);
    if (s >= kLevenshteinThreshold && s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace cwm::eval

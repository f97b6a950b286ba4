#include "cwm/mine/negmine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "cwm/util/io.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/util/text.hpp"
#include "cwm/version.hpp"
#include "cwm/world/rules.hpp"
#include "cwm/world/sim.hpp"

namespace cwm::mine {

namespace {

/// Gold surfaces per family across the whole input set, used as the
/// cross-task pool.
std::map<std::string, std::set<std::string>> gold_surfaces_by_family(
    const std::vector<world::EpisodeLog>& episodes) {
  std::map<std::string, std::set<std::string>> by_family;
  for (const auto& ep : episodes) {
    for (const auto& step : ep.steps) {
      by_family[ep.family].insert(step.gold_surface);
    }
  }
  return by_family;
}

std::vector<NegativeSample> sample_pool(std::vector<NegativeSample>& pool,
                                        std::size_t want, util::Rng& rng) {
  std::vector<NegativeSample> out;
  if (pool.empty() || want == 0) return out;
  const std::size_t take = std::min(want, pool.size());
  std::vector<std::size_t> picks = rng.sample_indices(pool.size(), take);
  std::sort(picks.begin(), picks.end());
  for (auto it = picks.rbegin(); it != picks.rend(); ++it) {
    out.push_back(std::move(pool[*it]));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  std::reverse(out.begin(), out.end());  // keep original pool order
  return out;
}

}  // namespace

nlohmann::json mining_config_to_json(const MiningConfig& c) {
  return {{"num_negatives", c.num_negatives}, {"max_type1", c.max_type1},
          {"max_type2", c.max_type2},         {"max_type3", c.max_type3},
          {"seed", c.seed}};
}

MiningConfig mining_config_from_json(const nlohmann::json& j) {
  MiningConfig c;
  c.num_negatives = j.value("num_negatives", c.num_negatives);
  c.max_type1 = j.value("max_type1", c.max_type1);
  c.max_type2 = j.value("max_type2", c.max_type2);
  c.max_type3 = j.value("max_type3", c.max_type3);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<TrainingInstance> mine_env_negatives(
    const std::vector<world::EpisodeLog>& episodes,
    const MiningConfig& config) {
  if (config.max_type1 + config.max_type2 + config.max_type3 !=
      config.num_negatives) {
    throw std::invalid_argument("type caps must sum to num_negatives");
  }
  const auto golds = gold_surfaces_by_family(episodes);

  std::vector<TrainingInstance> out;
  for (const auto& ep : episodes) {
    for (std::size_t si = 0; si < ep.steps.size(); ++si) {
      const world::StepRecord& step = ep.steps[si];
      TrainingInstance inst;
      inst.family = ep.family;
      inst.variation = ep.variation;
      inst.seed = ep.seed;
      inst.step_index = static_cast<int>(si);
      inst.state_prompt = step.state_prompt;
      inst.gold_surface = step.gold_surface;

      // Candidate sets arrive surface-sorted, so the pools inherit a
      // deterministic order.
      std::vector<NegativeSample> pool1, pool2, pool3;
      std::set<std::string> effective_here;
      for (const world::Candidate& c : step.candidates) {
        if (c.cls == world::FeedbackClass::Effective) {
          effective_here.insert(c.action.surface);
        }
      }
      for (const world::Candidate& c : step.candidates) {
        if (c.action.surface == step.gold_surface) continue;
        if (c.cls == world::FeedbackClass::Silent) {
          pool1.push_back({c.action.surface, kType1Silent, ""});
        } else if (c.cls == world::FeedbackClass::Rejected) {
          pool2.push_back({c.action.surface, kType2Rejected, ""});
        }
      }
      for (const auto& [family, surfaces] : golds) {
        if (family == ep.family) continue;
        for (const std::string& surface : surfaces) {
          if (surface == step.gold_surface) continue;
          if (effective_here.count(surface) > 0) continue;
          pool3.push_back({surface, kType3CrossTask, family});
        }
      }
      // A surface can be gold for several families; keep the first.
      std::sort(pool3.begin(), pool3.end(),
                [](const NegativeSample& a, const NegativeSample& b) {
                  if (a.surface != b.surface) return a.surface < b.surface;
                  return a.source_family < b.source_family;
                });
      pool3.erase(std::unique(pool3.begin(), pool3.end(),
                              [](const NegativeSample& a,
                                 const NegativeSample& b) {
                                return a.surface == b.surface;
                              }),
                  pool3.end());

      util::Rng rng(util::derive_seed(
          config.seed,
          "mine/" + ep.family + "/" + std::to_string(ep.variation) + "/" +
              std::to_string(ep.seed),
          static_cast<std::uint64_t>(si)));

      auto taken1 =
          sample_pool(pool1, static_cast<std::size_t>(config.max_type1), rng);
      auto taken2 =
          sample_pool(pool2, static_cast<std::size_t>(config.max_type2), rng);
      auto taken3 =
          sample_pool(pool3, static_cast<std::size_t>(config.max_type3), rng);

      // Backfill any shortfall from the remaining pools in type order;
      // never duplicate, never pad.
      const std::size_t want = static_cast<std::size_t>(config.num_negatives);
      std::size_t have = taken1.size() + taken2.size() + taken3.size();
      for (auto* pool : {&pool1, &pool2, &pool3}) {
        if (have >= want) break;
        auto extra = sample_pool(*pool, want - have, rng);
        have += extra.size();
        if (pool == &pool1) {
          for (auto& s : extra) taken1.push_back(std::move(s));
        } else if (pool == &pool2) {
          for (auto& s : extra) taken2.push_back(std::move(s));
        } else {
          for (auto& s : extra) taken3.push_back(std::move(s));
        }
      }

      for (auto& s : taken1) inst.negatives.push_back(std::move(s));
      for (auto& s : taken2) inst.negatives.push_back(std::move(s));
      for (auto& s : taken3) inst.negatives.push_back(std::move(s));
      if (inst.negatives.empty()) continue;  // nothing to contrast against
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::optional<NegativeSample> mine_minimal_edit(
    const world::WorldState& state, const std::string& gold_surface) {
  const std::vector<std::string> tokens = util::split_tokens(gold_surface);
  std::optional<NegativeSample> fallback;  // unparseable edit, kept as plan B
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto swapped = world::antonym_of(tokens[i]);
    if (!swapped.has_value()) continue;
    std::vector<std::string> edited = tokens;
    edited[i] = *swapped;
    const std::string surface = util::join(edited, " ");
    if (surface == gold_surface) continue;
    const world::StepResult result = world::step_text(state, surface);
    if (result.feedback.cls == world::FeedbackClass::Effective) continue;
    NegativeSample sample{surface, kType4MinimalEdit, ""};
    if (result.feedback.cls == world::FeedbackClass::ParseError) {
      if (!fallback.has_value()) fallback = std::move(sample);
      continue;
    }
    return sample;
  }
  return fallback;
}

MiningStats dataset_stats(const std::vector<TrainingInstance>& instances) {
  MiningStats stats;
  stats.instances = instances.size();
  for (const auto& inst : instances) {
    for (const auto& neg : inst.negatives) {
      if (neg.type == kType1Silent) stats.type1 += 1;
      else if (neg.type == kType2Rejected) stats.type2 += 1;
      else if (neg.type == kType3CrossTask) stats.type3 += 1;
    }
    if (inst.negatives.size() < 16) stats.underfilled += 1;
  }
  return stats;
}

nlohmann::json mining_stats_to_json(const MiningStats& stats) {
  return {{"instances", stats.instances}, {"type1_silent", stats.type1},
          {"type2_rejected", stats.type2}, {"type3_crosstask", stats.type3},
          {"underfilled", stats.underfilled}};
}

nlohmann::json training_instance_to_json(const TrainingInstance& inst) {
  nlohmann::json negs = nlohmann::json::array();
  for (const auto& neg : inst.negatives) {
    nlohmann::json jn = {{"surface", neg.surface}, {"type", neg.type}};
    if (!neg.source_family.empty()) jn["source_family"] = neg.source_family;
    negs.push_back(std::move(jn));
  }
  return {{"schema_version", kSchemaVersion},
          {"family", inst.family},
          {"variation", inst.variation},
          {"seed", inst.seed},
          {"step_index", inst.step_index},
          {"state_prompt", inst.state_prompt},
          {"gold_surface", inst.gold_surface},
          {"negatives", std::move(negs)}};
}

TrainingInstance training_instance_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("instance schema version mismatch");
  }
  TrainingInstance inst;
  inst.family = j.at("family").get<std::string>();
  inst.variation = j.at("variation").get<int>();
  inst.seed = j.at("seed").get<std::uint64_t>();
  inst.step_index = j.at("step_index").get<int>();
  inst.state_prompt = j.at("state_prompt").get<std::string>();
  inst.gold_surface = j.at("gold_surface").get<std::string>();
  for (const auto& jn : j.at("negatives")) {
    NegativeSample neg;
    neg.surface = jn.at("surface").get<std::string>();
    neg.type = jn.at("type").get<std::string>();
    neg.source_family = jn.value("source_family", std::string{});
    inst.negatives.push_back(std::move(neg));
  }
  return inst;
}

void write_instances(const std::string& path,
                     const std::vector<TrainingInstance>& instances) {
  std::vector<nlohmann::json> rows;
  rows.reserve(instances.size());
  for (const auto& inst : instances) {
    rows.push_back(training_instance_to_json(inst));
  }
  util::write_jsonl(path, rows);
}

std::vector<TrainingInstance> read_instances(const std::string& path) {
  std::vector<TrainingInstance> out;
  for (const auto& row : util::read_jsonl(path)) {
    out.push_back(training_instance_from_json(row));
  }
  return out;
}

}  // namespace cwm::mine

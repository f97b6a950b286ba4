#include "cwm/harness/harness.hpp"

#include <algorithm>
#include <memory>
#include <set>
#include <stdexcept>

#include "cwm/model/scorer.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/version.hpp"
#include "cwm/world/sim.hpp"

namespace cwm::harness {

SystemUnderTest make_system(const SystemSpec& spec) {
  SystemUnderTest sut;
  sut.name = spec.kind;
  if (spec.kind == "cwm" || spec.kind == "sft") {
    auto params = std::make_shared<model::ScorerParams>(
        model::load_checkpoint(spec.checkpoint));
    sut.score = [params](const std::string& state, const std::string& action) {
      return model::score(*params, state, action);
    };
  } else if (spec.kind == "untrained") {
    auto params = std::make_shared<model::ScorerParams>(
        model::init_params(model::build_vocabulary(), 64, 64, spec.seed));
    sut.score = [params](const std::string& state, const std::string& action) {
      return model::score(*params, state, action);
    };
  } else if (spec.kind == "random") {
    const std::uint64_t seed = spec.seed;
    sut.score = [seed](const std::string& state, const std::string& action) {
      // iid uniform per (state, action) pair, stable across calls.
      util::Rng rng(util::derive_seed(seed, state + "\x1f" + action));
      return rng.uniform();
    };
  } else {
    throw std::invalid_argument("unknown system kind: " + spec.kind);
  }
  return sut;
}

std::vector<world::Episode> episodes_from_logs(
    const std::vector<world::EpisodeLog>& logs) {
  std::vector<world::Episode> episodes;
  episodes.reserve(logs.size());
  for (const auto& log : logs) {
    world::Episode ep = world::init_episode(
        world::family_from_string(log.family), log.variation, log.seed);
    if (ep.gold.size() != log.steps.size()) {
      throw std::runtime_error("episode log out of sync with simulator: " +
                               log.family);
    }
    for (std::size_t i = 0; i < log.steps.size(); ++i) {
      if (ep.gold[i].surface != log.steps[i].gold_surface) {
        throw std::runtime_error("gold surface mismatch on replay: " +
                                 log.steps[i].gold_surface);
      }
    }
    episodes.push_back(std::move(ep));
  }
  return episodes;
}

namespace {

struct StepContext {
  std::string state_prompt;
  std::string gold_surface;
  std::vector<std::string> rejected_pool;
  std::vector<std::string> cross_pool;
  std::optional<mine::NegativeSample> edit;
};

std::vector<StepContext> collect_steps(
    const std::vector<world::Episode>& episodes) {
  // Cross-task pools need every family's gold surfaces first.
  std::map<std::string, std::set<std::string>> golds;
  for (const auto& ep : episodes) {
    for (const auto& action : ep.gold) {
      golds[world::to_string(ep.family)].insert(action.surface);
    }
  }

  std::vector<StepContext> steps;
  for (const auto& ep : episodes) {
    world::WorldState state = ep.initial_state;
    for (const auto& gold : ep.gold) {
      StepContext ctx;
      ctx.state_prompt = world::render_state(state);
      ctx.gold_surface = gold.surface;

      const world::CandidateSet candidates =
          world::enumerate_candidates(state);
      std::set<std::string> effective_here;
      for (const auto& c : candidates) {
        if (c.cls == world::FeedbackClass::Effective) {
          effective_here.insert(c.action.surface);
        }
        if (c.cls == world::FeedbackClass::Rejected &&
            c.action.surface != gold.surface) {
          ctx.rejected_pool.push_back(c.action.surface);
        }
      }
      for (const auto& [family, surfaces] : golds) {
        if (family == world::to_string(ep.family)) continue;
        for (const std::string& surface : surfaces) {
          if (surface == gold.surface) continue;
          if (effective_here.count(surface) > 0) continue;
          ctx.cross_pool.push_back(surface);
        }
      }
      std::sort(ctx.cross_pool.begin(), ctx.cross_pool.end());
      ctx.cross_pool.erase(
          std::unique(ctx.cross_pool.begin(), ctx.cross_pool.end()),
          ctx.cross_pool.end());
      ctx.edit = mine::mine_minimal_edit(state, gold.surface);

      steps.push_back(std::move(ctx));

      const world::StepResult result = world::step(state, gold);
      if (result.feedback.cls != world::FeedbackClass::Effective) {
        throw std::runtime_error("gold step not effective: " + gold.surface);
      }
      state = std::move(result.state);
    }
  }
  return steps;
}

std::vector<mine::NegativeSample> sample_surfaces(
    const std::vector<std::string>& pool, const char* type, int limit,
    util::Rng& rng) {
  std::vector<mine::NegativeSample> out;
  const std::size_t take =
      std::min(pool.size(), static_cast<std::size_t>(limit));
  std::vector<std::size_t> picks = rng.sample_indices(pool.size(), take);
  std::sort(picks.begin(), picks.end());
  for (std::size_t idx : picks) {
    out.push_back({pool[idx], type, ""});
  }
  return out;
}

}  // namespace

std::vector<IntrinsicCase> build_intrinsic_testset(
    const std::vector<world::Episode>& episodes, const IntrinsicCounts& counts,
    std::uint64_t seed, int max_negatives) {
  std::vector<StepContext> steps = collect_steps(episodes);

  std::vector<int> assignment(steps.size(), -1);  // 0=edit, 1=rej, 2=cross
  int need_edit = counts.minimal_edit;
  int need_rej = counts.rejection_only;
  int need_cross = counts.cross_task;
  for (std::size_t i = 0; i < steps.size() && need_edit > 0; ++i) {
    if (steps[i].edit.has_value()) {
      assignment[i] = 0;
      need_edit -= 1;
    }
  }
  for (std::size_t i = 0; i < steps.size() && need_rej > 0; ++i) {
    if (assignment[i] == -1 && !steps[i].rejected_pool.empty()) {
      assignment[i] = 1;
      need_rej -= 1;
    }
  }
  for (std::size_t i = 0; i < steps.size() && need_cross > 0; ++i) {
    if (assignment[i] == -1 && !steps[i].cross_pool.empty()) {
      assignment[i] = 2;
      need_cross -= 1;
    }
  }
  if (need_edit > 0 || need_rej > 0 || need_cross > 0) {
    throw std::runtime_error(
        "not enough eligible steps for the intrinsic testset (short " +
        std::to_string(need_edit) + " minimal-edit, " +
        std::to_string(need_rej) + " rejection, " +
        std::to_string(need_cross) + " cross-task)");
  }

  std::vector<IntrinsicCase> cases;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (assignment[i] == -1) continue;
    IntrinsicCase c;
    c.state_prompt = steps[i].state_prompt;
    c.gold_surface = steps[i].gold_surface;
    util::Rng rng(util::derive_seed(seed, "intrinsic_negatives",
                                    static_cast<std::uint64_t>(i)));
    if (assignment[i] == 0) {
      c.category = kCategoryMinimalEdit;
      c.negatives.push_back(*steps[i].edit);
    } else if (assignment[i] == 1) {
      c.category = kCategoryRejection;
      c.negatives = sample_surfaces(steps[i].rejected_pool,
                                    mine::kType2Rejected, max_negatives, rng);
    } else {
      c.category = kCategoryCrossTask;
      c.negatives = sample_surfaces(steps[i].cross_pool,
                                    mine::kType3CrossTask, max_negatives, rng);
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

IntrinsicReport eval_intrinsic(const SystemUnderTest& system,
                               const std::vector<IntrinsicCase>& cases) {
  std::map<std::string, std::vector<eval::RankedInstance>> grouped;
  for (const IntrinsicCase& c : cases) {
    eval::RankedInstance inst;
    inst.pos = system.score(c.state_prompt, c.gold_surface);
    for (const auto& neg : c.negatives) {
      inst.negs.push_back(system.score(c.state_prompt, neg.surface));
    }
    grouped[c.category].push_back(inst);
    grouped[kCategoryCombined].push_back(std::move(inst));
  }

  IntrinsicReport report;
  report.system = system.name;
  for (auto& [category, instances] : grouped) {
    report.categories[category] = eval::compute_metrics(instances);
  }
  return report;
}

nlohmann::json intrinsic_report_to_json(const IntrinsicReport& report) {
  nlohmann::json categories;
  for (const auto& [name, bundle] : report.categories) {
    categories[name] = eval::metric_bundle_to_json(bundle);
  }
  return {{"schema_version", kSchemaVersion},
          {"system", report.system},
          {"categories", std::move(categories)}};
}

IntrinsicReport intrinsic_report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("intrinsic report schema version mismatch");
  }
  IntrinsicReport report;
  report.system = j.at("system").get<std::string>();
  for (const auto& [name, bundle] : j.at("categories").items()) {
    report.categories[name] = eval::metric_bundle_from_json(bundle);
  }
  return report;
}

FilterReport run_filter_eval(const SystemUnderTest& system,
                             const std::vector<world::Episode>& episodes,
                             const std::string& condition,
                             const std::vector<int>& ks) {
  std::vector<eval::FilterRecord> records;
  for (const auto& ep : episodes) {
    world::WorldState state = ep.initial_state;
    for (const auto& gold : ep.gold) {
      const std::string prompt = world::render_state(state);
      const world::CandidateSet candidates =
          world::enumerate_candidates(state);
      std::vector<std::string> surfaces;
      surfaces.reserve(candidates.size());
      for (const auto& c : candidates) surfaces.push_back(c.action.surface);

      eval::FilterRecord record;
      const auto gold_idx = eval::match_gold(surfaces, gold.surface);
      if (!gold_idx.has_value()) {
        record.excluded = true;
      } else {
        record.gold_score = system.score(prompt, surfaces[*gold_idx]);
        for (std::size_t i = 0; i < surfaces.size(); ++i) {
          if (i == *gold_idx) continue;
          record.other_scores.push_back(system.score(prompt, surfaces[i]));
        }
      }
      records.push_back(std::move(record));

      const world::StepResult result = world::step(state, gold);
      if (result.feedback.cls != world::FeedbackClass::Effective) {
        throw std::runtime_error("teacher-forced gold step not effective: " +
                                 gold.surface);
      }
      state = std::move(result.state);
    }
  }

  FilterReport report;
  report.system = system.name;
  report.condition = condition;
  for (int k : ks) report.garr[k] = eval::garr_at_k(records, k);
  report.safety_margin = eval::mean_safety_margin(records);
  report.exclusion_rate = eval::exclusion_rate(records);
  report.steps = records.size();
  report.episodes = episodes.size();
  return report;
}

nlohmann::json filter_report_to_json(const FilterReport& report) {
  nlohmann::json garr;
  for (const auto& [k, v] : report.garr) {
    garr[std::to_string(k)] = v;
  }
  return {{"schema_version", kSchemaVersion},
          {"system", report.system},
          {"condition", report.condition},
          {"garr", std::move(garr)},
          {"safety_margin", report.safety_margin},
          {"exclusion_rate", report.exclusion_rate},
          {"steps", report.steps},
          {"episodes", report.episodes}};
}

FilterReport filter_report_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("filter report schema version mismatch");
  }
  FilterReport report;
  report.system = j.at("system").get<std::string>();
  report.condition = j.at("condition").get<std::string>();
  for (const auto& [k, v] : j.at("garr").items()) {
    report.garr[std::stoi(k)] = v.get<double>();
  }
  report.safety_margin = j.at("safety_margin").get<double>();
  report.exclusion_rate = j.at("exclusion_rate").get<double>();
  report.steps = j.at("steps").get<std::size_t>();
  report.episodes = j.at("episodes").get<std::size_t>();
  return report;
}

}  // namespace cwm::harness

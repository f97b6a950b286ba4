#pragma once

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cwm/eval/metrics.hpp"
#include "cwm/mine/negmine.hpp"
#include "cwm/world/episode.hpp"

namespace cwm::harness {

inline constexpr const char* kCategoryRejection = "rejection_only";
inline constexpr const char* kCategoryCrossTask = "cross_task";
inline constexpr const char* kCategoryMinimalEdit = "minimal_edit";
inline constexpr const char* kCategoryCombined = "combined";

/// How to instantiate a scoring system. kind is one of "cwm", "sft"
/// (trained checkpoints), "untrained" (fresh random init), or "random"
/// (state/action-hashed iid uniform scores).
struct SystemSpec {
  std::string kind;
  std::string checkpoint;  // cwm/sft only
  std::uint64_t seed = 0;  // untrained/random only
};

struct SystemUnderTest {
  std::string name;
  std::function<double(const std::string&, const std::string&)> score;
};

SystemUnderTest make_system(const SystemSpec& spec);

/// Re-instantiates episodes from the (family, variation, seed) keys of
/// serialized logs and cross-checks the replay against the recorded gold
/// surfaces.
std::vector<world::Episode> episodes_from_logs(
    const std::vector<world::EpisodeLog>& logs);

struct IntrinsicCounts {
  int rejection_only = 225;
  int cross_task = 306;
  int minimal_edit = 74;
};

struct IntrinsicCase {
  std::string category;
  std::string state_prompt;
  std::string gold_surface;
  std::vector<mine::NegativeSample> negatives;
};

/// Builds the stress testset by walking gold trajectories and assigning
/// each step to one category: minimal-edit steps first (they are the
/// scarcest), then rejection-only, then cross-task. Throws if the
/// episode supply cannot fill the requested counts.
std::vector<IntrinsicCase> build_intrinsic_testset(
    const std::vector<world::Episode>& episodes, const IntrinsicCounts& counts,
    std::uint64_t seed, int max_negatives = 8);

struct IntrinsicReport {
  std::string system;
  std::map<std::string, eval::MetricBundle> categories;
};

IntrinsicReport eval_intrinsic(const SystemUnderTest& system,
                               const std::vector<IntrinsicCase>& cases);

nlohmann::json intrinsic_report_to_json(const IntrinsicReport& report);
IntrinsicReport intrinsic_report_from_json(const nlohmann::json& j);

struct FilterReport {
  std::string system;
  std::string condition;  // "in_domain" or "ood"
  std::map<int, double> garr;
  double safety_margin = 0.0;
  double exclusion_rate = 0.0;
  std::size_t steps = 0;
  std::size_t episodes = 0;
};

/// Teacher-forced filter characterization: at every state along the gold
/// trajectory, scores all candidates, locates the gold via the fuzzy
/// matcher, records rank and margin, then executes the true gold action.
/// Throws if any gold step fails to execute effectively.
FilterReport run_filter_eval(const SystemUnderTest& system,
                             const std::vector<world::Episode>& episodes,
                             const std::string& condition,
                             const std::vector<int>& ks = {1, 5, 10, 20});

nlohmann::json filter_report_to_json(const FilterReport& report);
FilterReport filter_report_from_json(const nlohmann::json& j);

}  // namespace cwm::harness

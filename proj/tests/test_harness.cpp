#include <doctest.h>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cwm/harness/harness.hpp"
#include "cwm/mine/negmine.hpp"
#include "cwm/model/scorer.hpp"
#include "cwm/model/vocab.hpp"
#include "cwm/util/rng.hpp"
#include "cwm/util/text.hpp"
#include "cwm/world/episode.hpp"

using namespace cwm;
using namespace cwm::harness;

namespace {

// Heldout-variation episodes, three waves, mirroring the evaluation grid.
const std::vector<world::EpisodeLog>& heldout_logs() {
  static const std::vector<world::EpisodeLog> logs = [] {
    std::vector<world::EpisodeLog> out;
    for (int wave = 0; wave < 3; ++wave) {
      const std::uint64_t wave_seed = util::derive_seed(7, "wave", wave);
      for (world::Family family : world::all_families()) {
        for (int variation = 7; variation <= 9; ++variation) {
          const std::uint64_t seed =
              util::derive_seed(wave_seed, world::to_string(family),
                                static_cast<std::uint64_t>(variation));
          out.push_back(world::run_episode(
              world::init_episode(family, variation, seed)));
        }
      }
    }
    return out;
  }();
  return logs;
}

const std::vector<world::Episode>& heldout_episodes() {
  static const std::vector<world::Episode> eps =
      episodes_from_logs(heldout_logs());
  return eps;
}

const std::vector<IntrinsicCase>& default_testset() {
  static const std::vector<IntrinsicCase> cases =
      build_intrinsic_testset(heldout_episodes(), IntrinsicCounts{}, 7);
  return cases;
}

}  // namespace

TEST_CASE("episode reconstruction from logs replays the recorded gold") {
  const auto& logs = heldout_logs();
  const auto& episodes = heldout_episodes();
  REQUIRE(episodes.size() == logs.size());
  for (std::size_t i = 0; i < episodes.size(); ++i) {
    CHECK(world::to_string(episodes[i].family) == logs[i].family);
    CHECK(episodes[i].variation == logs[i].variation);
    REQUIRE(episodes[i].gold.size() == logs[i].steps.size());
    for (std::size_t s = 0; s < logs[i].steps.size(); ++s) {
      CHECK(episodes[i].gold[s].surface == logs[i].steps[s].gold_surface);
    }
  }
}

TEST_CASE("the stress testset has the pinned category census") {
  const auto& cases = default_testset();
  std::map<std::string, int> by_category;
  for (const IntrinsicCase& c : cases) by_category[c.category] += 1;

  CHECK(cases.size() == 605);
  CHECK(by_category[kCategoryRejection] == 225);
  CHECK(by_category[kCategoryCrossTask] == 306);
  CHECK(by_category[kCategoryMinimalEdit] == 74);
}

TEST_CASE("each category carries only its own negative type") {
  for (const IntrinsicCase& c : default_testset()) {
    REQUIRE_FALSE(c.negatives.empty());
    CHECK(c.negatives.size() <= 8);
    for (const mine::NegativeSample& neg : c.negatives) {
      if (c.category == kCategoryRejection) {
        CHECK(neg.type == std::string(mine::kType2Rejected));
      } else if (c.category == kCategoryCrossTask) {
        CHECK(neg.type == std::string(mine::kType3CrossTask));
      } else if (c.category == kCategoryMinimalEdit) {
        CHECK(neg.type == std::string(mine::kType4MinimalEdit));
        // Minimal edits differ from the gold in exactly one token.
        const auto gold_tokens = util::split_tokens(c.gold_surface);
        const auto neg_tokens = util::split_tokens(neg.surface);
        REQUIRE(gold_tokens.size() == neg_tokens.size());
        int diff = 0;
        for (std::size_t i = 0; i < gold_tokens.size(); ++i) {
          diff += (gold_tokens[i] != neg_tokens[i]) ? 1 : 0;
        }
        CHECK(diff == 1);
      } else {
        FAIL("unexpected category ", c.category);
      }
    }
  }
}

TEST_CASE("testset construction is deterministic and seed-sensitive") {
  const auto a = build_intrinsic_testset(heldout_episodes(),
                                         IntrinsicCounts{}, 7);
  const auto b = build_intrinsic_testset(heldout_episodes(),
                                         IntrinsicCounts{}, 7);
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same &= a[i].state_prompt == b[i].state_prompt &&
            a[i].gold_surface == b[i].gold_surface &&
            a[i].negatives.size() == b[i].negatives.size();
  }
  CHECK(same);

  const auto c = build_intrinsic_testset(heldout_episodes(),
                                         IntrinsicCounts{}, 8);
  REQUIRE(c.size() == a.size());
  bool all_equal = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    all_equal &= a[i].state_prompt == c[i].state_prompt &&
                 a[i].gold_surface == c[i].gold_surface;
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("an undersized episode supply is reported, not padded") {
  std::vector<world::Episode> few = {heldout_episodes().front()};
  CHECK_THROWS_AS(build_intrinsic_testset(few, IntrinsicCounts{}, 7),
                  std::runtime_error);
}

TEST_CASE("systems are deterministic scoring functions") {
  SystemSpec random_spec{"random", "", 42};
  const SystemUnderTest random_a = make_system(random_spec);
  const SystemUnderTest random_b = make_system(random_spec);
  CHECK(random_a.name == "random");
  const double r1 = random_a.score("state text", "action text");
  const double r2 = random_b.score("state text", "action text");
  CHECK(r1 == r2);
  CHECK(random_a.score("state text", "other action") != r1);

  // The untrained system scores exactly like a fresh initialization.
  SystemSpec untrained_spec{"untrained", "", 7};
  const SystemUnderTest untrained = make_system(untrained_spec);
  const model::ScorerParams fresh =
      model::init_params(model::build_vocabulary(), 64, 64, 7);
  CHECK(untrained.score("heat the water", "cool the water") ==
        model::score(fresh, "heat the water", "cool the water"));

  CHECK_THROWS(make_system(SystemSpec{"martian", "", 0}));
}

TEST_CASE("intrinsic evaluation fills every category block") {
  const SystemUnderTest random_system = make_system(SystemSpec{"random", "", 9});
  const IntrinsicReport report =
      eval_intrinsic(random_system, default_testset());

  CHECK(report.system == "random");
  REQUIRE(report.categories.count(kCategoryCombined) == 1);
  REQUIRE(report.categories.count(kCategoryRejection) == 1);
  REQUIRE(report.categories.count(kCategoryCrossTask) == 1);
  REQUIRE(report.categories.count(kCategoryMinimalEdit) == 1);

  const auto& combined = report.categories.at(kCategoryCombined);
  CHECK(combined.instances == 605);
  CHECK(report.categories.at(kCategoryRejection).instances == 225);
  CHECK(report.categories.at(kCategoryCrossTask).instances == 306);
  CHECK(report.categories.at(kCategoryMinimalEdit).instances == 74);

  // A random scorer cannot separate positives from negatives.
  CHECK(combined.auc > 0.45);
  CHECK(combined.auc < 0.55);

  // Round-trip through json.
  const IntrinsicReport back =
      intrinsic_report_from_json(intrinsic_report_to_json(report));
  CHECK(intrinsic_report_to_json(back) == intrinsic_report_to_json(report));
}

TEST_CASE("filter evaluation walks every gold step teacher-forced") {
  std::vector<world::Episode> episodes(heldout_episodes().begin(),
                                       heldout_episodes().begin() + 4);
  std::size_t steps = 0;
  for (const auto& ep : episodes) steps += ep.gold.size();

  const SystemUnderTest random_system =
      make_system(SystemSpec{"random", "", 3});
  const FilterReport report =
      run_filter_eval(random_system, episodes, "in_domain");

  CHECK(report.condition == "in_domain");
  CHECK(report.steps == steps);
  CHECK(report.episodes == episodes.size());
  CHECK(report.exclusion_rate == 0.0);  // gold is always in the candidates

  REQUIRE(report.garr.count(1) == 1);
  REQUIRE(report.garr.count(20) == 1);
  double prev = 0.0;
  for (const auto& [k, value] : report.garr) {
    CHECK(value >= prev);
    CHECK(value <= 1.0);
    prev = value;
  }

  const FilterReport back =
      filter_report_from_json(filter_report_to_json(report));
  CHECK(filter_report_to_json(back) == filter_report_to_json(report));
}

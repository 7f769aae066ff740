// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "brace/analytics.hpp"
#include "brace/trajectory.hpp"

using namespace brace;

TEST_CASE("brier score worked examples") {
  // Confirmed (nominal 1.0) on a true fact: zero error
  CHECK(brier_score({{0, WepLevel::Confirmed, true}}) ==
        doctest::Approx(0.0).epsilon(1e-12));
  // Possible (0.5) on anything: 0.25
  CHECK(brier_score({{0, WepLevel::Possible, true}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(brier_score({{0, WepLevel::Possible, false}}) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // Unknown (0.0) on a true fact: worst case
  CHECK(brier_score({{0, WepLevel::Unknown, true}}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // mixture averages
  CHECK(brier_score({{0, WepLevel::Confirmed, true}, {0, WepLevel::Possible, true}}) ==
        doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(brier_score({}), EmptyRecordSet);
}

TEST_CASE("slope and fit oracles") {
  // perfect line y = 2x + 1
  std::vector<double> x = {0, 1, 2, 3, 4}, y = {1, 3, 5, 7, 9};
  CHECK(least_squares_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(linear_fit_r2(x, y) == doctest::Approx(1.0).epsilon(1e-12));

  // flat data
  CHECK(least_squares_slope(x, {2, 2, 2, 2, 2}) == doctest::Approx(0.0).epsilon(1e-12));

  // hand-computed small case: x={0,1,2}, y={0,0,3} -> slope 1.5
  CHECK(least_squares_slope({0, 1, 2}, {0, 0, 3}) ==
        doctest::Approx(1.5).epsilon(1e-12));
  CHECK(std::isnan(least_squares_slope({1.0}, {1.0})));
}

namespace {
std::vector<CalibrationRecord> mixed_records() {
  return {
      {0, WepLevel::Confirmed, true},  {0, WepLevel::Unknown, true},
      {1, WepLevel::Confirmed, true},  {1, WepLevel::Confirmed, false},
      {2, WepLevel::Probable, true},   {2, WepLevel::Probable, true},
      {2, WepLevel::Probable, false},
  };
}
}  // namespace

TEST_CASE("brier by step counts and averages per step") {
  auto b = brier_by_step(mixed_records());
  REQUIRE(b.mean.size() == 3);
  REQUIRE(b.count.size() == 3);
  CHECK(b.count[0] == 2);
  CHECK(b.mean[0] == doctest::Approx(0.5).epsilon(1e-12));  // (0 + 1)/2
  CHECK(b.count[1] == 2);
  CHECK(b.mean[1] == doctest::Approx(0.5).epsilon(1e-12));  // (0 + 1)/2
  CHECK(b.count[2] == 3);
  // Probable nominal 0.75: (0.0625 + 0.0625 + 0.5625)/3
  CHECK(b.mean[2] == doctest::Approx(0.229166666667).epsilon(1e-9));
}

TEST_CASE("calibration table groups by label with nominal anchors") {
  auto t = calibration_by_label(mixed_records());
  CHECK(t.total == 7);
  const auto& confirmed = t.rows[6];
  CHECK(confirmed.count == 3);
  CHECK(confirmed.truth_rate == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(confirmed.nominal == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.rows[4].count == 3);  // Probable
  CHECK(t.rows[4].truth_rate == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(t.rows[0].count == 1);  // Unknown
  CHECK(t.rows[1].count == 0);  // Doubtful absent
  // step filter
  auto late = calibration_by_label(mixed_records(), 2, 2);
  CHECK(late.total == 3);
  CHECK(late.rows[6].count == 0);
}

TEST_CASE("csv headers and shapes are stable") {
  auto b = brier_by_step(mixed_records());
  std::string csv = brier_by_step_csv(b);
  CHECK(csv.rfind("step,mean_brier,claims\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  auto t = calibration_by_label(mixed_records());
  csv = calibration_by_label_csv(t);
  CHECK(csv.rfind("label,count,empirical_truth_rate,nominal_probability\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + 7 levels
  CHECK(csv.find("absent") != std::string::npos);        // empty Doubtful row
}

namespace {
Checkpoint zero_checkpoint() {
  Checkpoint ck;
  ck.action_policy = PolicyParams::zeros(kActionFeatureDim);
  ck.label_policy = PolicyParams::zeros(kLabelFeatureDim);
  ck.value_head = PolicyParams::zeros(kValueFeatureDim);
  return ck;
}

std::vector<Trajectory> oracle_runs(int episodes) {
  Checkpoint ck = zero_checkpoint();
  std::vector<Trajectory> out;
  EpisodeConfig cfg;
  for (int i = 0; i < episodes; ++i) {
    auto w = generate_world(EnvConfig::quest(4, 6, 6, 500 + i));
    cfg.rng_seed = 1000 + i;
    out.push_back(run_episode(w, ck, cfg));
  }
  return out;
}
}  // namespace

TEST_CASE("scripted oracle runs produce a downward mean-error trend over steps") {
  auto runs = oracle_runs(200);
  std::vector<CalibrationRecord> records;
  for (const auto& t : runs) {
    auto r = collect_calibration_records(t);
    records.insert(records.end(), r.begin(), r.end());
  }
  REQUIRE(!records.empty());
  auto b = brier_by_step(records);
  REQUIRE(b.mean.size() >= 8);
  std::vector<double> x, y;
  for (size_t s = 0; s < b.mean.size(); ++s)
    if (b.count[s] > 0) {
      x.push_back(static_cast<double>(s));
      y.push_back(b.mean[s]);
    }
  CHECK(least_squares_slope(x, y) < 0.0);
}

TEST_CASE("label distribution fractions sum to one at every step") {
  auto runs = oracle_runs(20);
  auto d = label_distribution_by_step(runs);
  REQUIRE(!d.fractions.empty());
  for (size_t s = 0; s < d.fractions.size(); ++s) {
    if (d.counts[s] == 0) continue;
    double sum = 0.0;
    for (double f : d.fractions[s]) sum += f;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  std::string csv = label_dist_by_step_csv(d);
  CHECK(csv.rfind("step,label,fraction,claims\n", 0) == 0);
}

TEST_CASE("context growth aggregates word counts across episodes") {
  auto runs = oracle_runs(10);
  auto g = context_growth(runs);
  REQUIRE(!g.mean_raw_words.empty());
  REQUIRE(g.mean_raw_words.size() == g.mean_belief_words.size());
  REQUIRE(g.mean_raw_words.size() == g.alive.size());
  CHECK(g.alive[0] == 10);
  for (size_t s = 1; s < g.mean_raw_words.size(); ++s) {
    CHECK(g.alive[s] <= g.alive[s - 1]);
    if (g.alive[s] == g.alive[s - 1])
      CHECK(g.mean_raw_words[s] > g.mean_raw_words[s - 1]);
  }
  std::string csv = context_growth_csv(g);
  CHECK(csv.rfind("step,mean_raw_words,mean_belief_words,alive\n", 0) == 0);
}

TEST_CASE("trajectory JSONL round-trips through the reader") {
  auto runs = oracle_runs(3);
  std::stringstream buffer;
  buffer << R"({"meta": {"run": "test"}})" << "\n";
  for (int i = 0; i < 3; ++i) write_trajectory(buffer, i, runs[i]);
  auto back = read_trajectories(buffer);
  REQUIRE(back.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(back[i].records.size() == runs[i].records.size());
    CHECK(back[i].goal == runs[i].goal);
    CHECK(back[i].success == runs[i].success);
    for (size_t s = 0; s < back[i].records.size(); ++s) {
      CHECK(back[i].records[s].action == runs[i].records[s].action);
      CHECK(back[i].records[s].context_words_raw ==
            runs[i].records[s].context_words_raw);
      CHECK(render_belief(back[i].records[s].belief) ==
            render_belief(runs[i].records[s].belief));
    }
  }
}

TEST_CASE("step record JSON carries the contract fields") {
  auto runs = oracle_runs(1);
  const StepRecord& rec = runs[0].records.front();
  auto j = step_record_to_json(7, runs[0].goal, rec);
  for (const char* key :
       {"episode_id", "step", "goal", "observation_text", "belief", "action",
        "env_reward", "reward_breakdown", "context_words_belief",
        "context_words_raw"})
    CHECK(j.contains(key));
  CHECK(j["episode_id"] == 7);
}

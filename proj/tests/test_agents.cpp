// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "brace/agents.hpp"

using namespace brace;

TEST_CASE("goal parsing") {
  GoalSpec quest = parse_goal(
      "Your quest: 1. take the brass key. 2. unlock the oak door. "
      "3. put the apple in the wooden box.");
  CHECK(quest.quest_length == 3);
  CHECK_FALSE(quest.treasure);
  REQUIRE(quest.steps.size() == 3);
  CHECK(quest.steps[0] == "take the brass key");
  bool key = false, door = false, apple = false, box = false;
  for (const auto& n : quest.object_names) {
    key = key || n == "brass key";
    door = door || n == "oak door";
    apple = apple || n == "apple";
    box = box || n == "wooden box";
  }
  CHECK(key);
  CHECK(door);
  CHECK(apple);
  CHECK(box);

  GoalSpec treasure = parse_goal("Find the golden amulet and take it.");
  CHECK(treasure.treasure);
  REQUIRE(!treasure.object_names.empty());
  CHECK(treasure.object_names[0] == "golden amulet");
}

namespace {
Checkpoint zero_checkpoint() {
  Checkpoint ck;
  ck.action_policy = PolicyParams::zeros(kActionFeatureDim);
  ck.label_policy = PolicyParams::zeros(kLabelFeatureDim);
  ck.value_head = PolicyParams::zeros(kValueFeatureDim);
  return ck;
}
}  // namespace

TEST_CASE("scripted oracle beliefs are always well-formed and never wrong") {
  Checkpoint ck = zero_checkpoint();
  EpisodeConfig cfg;
  cfg.belief_mode = BeliefMode::Oracle;
  int claims_checked = 0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    auto w = generate_world(EnvConfig::quest(4, 6, 6, seed));
    cfg.rng_seed = seed;
    Trajectory t = run_episode(w, ck, cfg);
    REQUIRE(!t.records.empty());
    for (const StepRecord& r : t.records) {
      CHECK(r.reward.r_format == 1.0);
      CHECK(r.reward.verification.n_incorrect == 0);
      CHECK(r.reward.tracking.n_stale == 0);
      claims_checked += static_cast<int>(r.belief.claims.size());
    }
  }
  CHECK(claims_checked > 0);
}

TEST_CASE("oracle relabeling ages confirmations one notch and then holds") {
  GoalSpec goal = parse_goal("Your quest: 1. take the brass key.");
  auto w = generate_world(EnvConfig::quest(2, 3, 3, 7));
  Observation obs = initial_observation(w);
  BeliefState b = oracle_update(goal, BeliefState{}, obs);
  // everything observed right now is Confirmed
  for (const Claim& c : b.claims)
    if (c.slot != Slot::Other && c.label != WepLevel::Unknown)
      CHECK(c.label == WepLevel::Confirmed);

  // a later update with an empty observation ages stale confirmations
  Observation empty;
  BeliefState aged = oracle_update(goal, b, empty);
  BeliefState aged2 = oracle_update(goal, aged, empty);
  for (const Claim& c : aged.claims) {
    const Claim* before = b.find(c.slot, c.subject);
    if (before && before->label == WepLevel::Confirmed)
      CHECK(c.label == WepLevel::AlmostCertain);
  }
  for (const Claim& c : aged2.claims) {
    const Claim* mid = aged.find(c.slot, c.subject);
    if (mid && mid->label == WepLevel::AlmostCertain)
      CHECK(c.label == WepLevel::AlmostCertain);  // holds, no further decay
  }
}

TEST_CASE("summary baseline pins every label to Confirmed") {
  Checkpoint ck = zero_checkpoint();
  EpisodeConfig cfg;
  cfg.belief_mode = BeliefMode::Summary;
  auto w = generate_world(EnvConfig::quest(2, 4, 4, 3));
  Trajectory t = run_episode(w, ck, cfg);
  for (const StepRecord& r : t.records)
    for (const Claim& c : r.belief.claims) CHECK(c.label == WepLevel::Confirmed);
}

TEST_CASE("belief size stays within the structural bound") {
  Checkpoint ck = zero_checkpoint();
  EpisodeConfig cfg;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    auto w = generate_world(EnvConfig::quest(4, 6, 6, seed));
    size_t bound = static_cast<size_t>(
        w.rooms.size() + w.objects.size() + 4 * w.rooms.size() + 5);
    cfg.rng_seed = seed;
    Trajectory t = run_episode(w, ck, cfg);
    for (const StepRecord& r : t.records) {
      CHECK(r.belief.claims.size() <= bound);
      CHECK(r.belief.claims.size() <= static_cast<size_t>(kDefaultClaimCap));
    }
  }
}

TEST_CASE("zero label weights give the uniform label distribution") {
  std::vector<double> evidence(kEvidenceDim, 0.0);
  evidence[0] = 1.0;
  evidence[7] = 1.0;
  auto cands = label_candidates(evidence);
  REQUIRE(cands.size() == 7);
  for (const auto& row : cands)
    REQUIRE(row.size() == static_cast<size_t>(kLabelFeatureDim));
  auto p = softmax_policy(std::vector<double>(kLabelFeatureDim, 0.0), cands);
  for (double pi : p) CHECK(pi == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
}

TEST_CASE("label candidates put the evidence in disjoint blocks") {
  std::vector<double> evidence(kEvidenceDim, 0.0);
  for (int i = 0; i < kEvidenceDim; ++i) evidence[i] = 0.1 * (i + 1);
  auto cands = label_candidates(evidence);
  for (int level = 0; level < 7; ++level) {
    for (int j = 0; j < kLabelFeatureDim; ++j) {
      double expected = (j >= level * kEvidenceDim && j < (level + 1) * kEvidenceDim)
                            ? evidence[j - level * kEvidenceDim]
                            : 0.0;
      CHECK(cands[level][j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("a heavy weight on the top block makes Confirmed near-certain") {
  std::vector<double> w(kLabelFeatureDim, 0.0);
  // reward the observed-now bit in the Confirmed block
  w[6 * kEvidenceDim + 0] = 50.0;
  std::vector<double> evidence(kEvidenceDim, 0.0);
  evidence[0] = 1.0;
  auto p = softmax_policy(w, label_candidates(evidence));
  CHECK(p[6] > 0.99);
}

TEST_CASE("greedy action choice breaks ties lexicographically and is stable") {
  auto w = generate_world(EnvConfig::quest(4, 6, 6, 19));
  GoalSpec goal = parse_goal(w.goal_text);
  ObservationLog log;
  log.observe(initial_observation(w));
  auto candidates = admissible_actions(w);
  PolicyParams zero = PolicyParams::zeros(kActionFeatureDim);
  std::mt19937_64 rng(1);
  auto a = action_policy(goal, BeliefState{}, log, candidates, zero, rng, 1.0, true);
  auto b = action_policy(goal, BeliefState{}, log, candidates, zero, rng, 1.0, true);
  CHECK(a.index == b.index);
  // all-zero weights tie every candidate; the lexicographically smallest wins
  int expected = 0;
  for (size_t i = 1; i < candidates.size(); ++i)
    if (candidates[i].rendered < candidates[static_cast<size_t>(expected)].rendered)
      expected = static_cast<int>(i);
  CHECK(a.index == expected);
}

TEST_CASE("sampled actions are reproducible from the seed") {
  Checkpoint ck = zero_checkpoint();
  EpisodeConfig cfg;
  cfg.rng_seed = 99;
  auto w = generate_world(EnvConfig::quest(4, 6, 6, 8));
  Trajectory t1 = run_episode(w, ck, cfg);
  Trajectory t2 = run_episode(w, ck, cfg);
  REQUIRE(t1.records.size() == t2.records.size());
  for (size_t i = 0; i < t1.records.size(); ++i) {
    CHECK(t1.records[i].action == t2.records[i].action);
    CHECK(t1.records[i].observation_text == t2.records[i].observation_text);
    CHECK(render_belief(t1.records[i].belief) == render_belief(t2.records[i].belief));
  }
}

TEST_CASE("evidence features are rebuilt from the log alone") {
  auto w = generate_world(EnvConfig::quest(2, 3, 3, 13));
  ObservationLog log;
  Observation obs = initial_observation(w);
  log.observe(obs);
  GoalSpec goal = parse_goal(w.goal_text);
  ContentUpdate cu = update_content(goal, BeliefState{}, obs);
  REQUIRE(cu.belief.claims.size() == cu.observed_now.size());
  for (size_t i = 0; i < cu.belief.claims.size(); ++i) {
    auto f = evidence_features(cu.belief.claims[i], cu.observed_now[i], log);
    REQUIRE(f.size() == static_cast<size_t>(kEvidenceDim));
    // observed-now bit agrees with the content rule
    CHECK(f[0] == doctest::Approx(cu.observed_now[i] ? 1.0 : 0.0));
    // slot one-hot sums to one
    double slot_sum = 0.0;
    for (int s = 0; s < 6; ++s) slot_sum += f[static_cast<size_t>(7 + s)];
    CHECK(slot_sum == doctest::Approx(1.0));
    // recency buckets are exclusive
    double bucket_sum = 0.0;
    for (int s = 1; s <= 5; ++s) bucket_sum += f[static_cast<size_t>(s)];
    CHECK(bucket_sum == doctest::Approx(1.0));
  }
}

TEST_CASE("value features are bounded and well-shaped") {
  BeliefState b;
  b.claims.push_back(make_claim(Slot::Progress, "quest",
                                "1 of 4 quest steps completed", WepLevel::Confirmed));
  auto f = value_features(b, 5, 20);
  REQUIRE(f.size() == static_cast<size_t>(kValueFeatureDim));
  CHECK(f[0] == doctest::Approx(1.0));
  CHECK(f[1] == doctest::Approx(0.25));
  for (double x : f) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("raw transcript context grows monotonically, belief context does not") {
  Checkpoint ck = zero_checkpoint();
  EpisodeConfig cfg;
  cfg.rng_seed = 2;
  auto w = generate_world(EnvConfig::quest(4, 6, 6, 21, 40));
  Trajectory t = run_episode(w, ck, cfg);
  REQUIRE(t.records.size() >= 5);
  for (size_t i = 1; i < t.records.size(); ++i)
    CHECK(t.records[i].context_words_raw > t.records[i - 1].context_words_raw);
  int max_belief = 0, min_tail = 1 << 30;
  for (const StepRecord& r : t.records) max_belief = std::max(max_belief, r.context_words_belief);
  for (size_t i = t.records.size() / 2; i < t.records.size(); ++i)
    min_tail = std::min(min_tail, t.records[i].context_words_belief);
  CHECK(max_belief < t.records.back().context_words_raw);
  CHECK(min_tail > 0);
}

TEST_CASE("word counting") {
  CHECK(count_words("") == 0);
  CHECK(count_words("one") == 1);
  CHECK(count_words("  two  words \n") == 2);
  CHECK(count_words("a b c d") == 4);
}

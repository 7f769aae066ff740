// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "brace/agents.hpp"
#include "brace/reward.hpp"
#include "brace/wep.hpp"
#include "brace/world.hpp"

namespace {

void BM_GenerateQuestWorld(benchmark::State& state) {
  uint64_t seed = 0;
  for (auto _ : state) {
    auto w = brace::generate_world(brace::EnvConfig::quest(4, 6, 6, seed++));
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_GenerateQuestWorld);

void BM_GenerateTreasureWorld(benchmark::State& state) {
  uint64_t seed = 0;
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto w = brace::generate_world(brace::EnvConfig::treasure(level, seed++, 400));
    benchmark::DoNotOptimize(w);
  }
}
BENCHMARK(BM_GenerateTreasureWorld)->Arg(1)->Arg(10)->Arg(30);

void BM_ParseBelief(benchmark::State& state) {
  std::string text;
  for (int i = 0; i < 20; ++i)
    text += "- [ObjectState] item " + std::to_string(i) +
            " | in the kitchen | probable\n";
  for (auto _ : state) {
    auto b = brace::parse_belief(text);
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_ParseBelief);

void BM_ValidateFormat(benchmark::State& state) {
  brace::BeliefState b;
  b.claims.push_back(brace::make_claim(brace::Slot::Location, "player",
                                       "in the kitchen", brace::WepLevel::Confirmed));
  b.claims.push_back(brace::make_claim(brace::Slot::Exit, "north exit from kitchen",
                                       "no door", brace::WepLevel::Confirmed));
  b.claims.push_back(brace::make_claim(brace::Slot::Inventory, "inventory", "empty",
                                       brace::WepLevel::Confirmed));
  b.claims.push_back(brace::make_claim(brace::Slot::Progress, "quest",
                                       "0 of 3 quest steps completed",
                                       brace::WepLevel::Confirmed));
  for (int i = 0; i < 30; ++i)
    b.claims.push_back(brace::make_claim(brace::Slot::ObjectState,
                                         "item " + std::to_string(i),
                                         "in the pantry", brace::WepLevel::Probable));
  for (auto _ : state) {
    auto report = brace::validate_format(b);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_ValidateFormat);

void BM_OracleEpisode(benchmark::State& state) {
  brace::Checkpoint ck;
  ck.action_policy = brace::PolicyParams::zeros(brace::kActionFeatureDim);
  ck.label_policy = brace::PolicyParams::zeros(brace::kLabelFeatureDim);
  ck.value_head = brace::PolicyParams::zeros(brace::kValueFeatureDim);
  brace::EpisodeConfig cfg;
  uint64_t seed = 0;
  for (auto _ : state) {
    auto w = brace::generate_world(brace::EnvConfig::quest(4, 6, 6, seed));
    cfg.rng_seed = seed++;
    auto t = brace::run_episode(w, ck, cfg);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_OracleEpisode);

void BM_ScoreBelief(benchmark::State& state) {
  auto w = brace::generate_world(brace::EnvConfig::quest(4, 6, 6, 7));
  auto obs = brace::initial_observation(w);
  auto goal = brace::parse_goal(w.goal_text);
  auto belief = brace::oracle_update(goal, brace::BeliefState{}, obs);
  brace::FactHistory history;
  history.record(obs);
  for (auto _ : state) {
    auto r = brace::score_belief(brace::BeliefState{}, obs, belief, w, history,
                                 /*t=*/0, /*success=*/false);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ScoreBelief);

}  // namespace

BENCHMARK_MAIN();

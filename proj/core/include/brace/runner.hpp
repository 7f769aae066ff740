// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include "brace/agents.hpp"
#include "brace/rl.hpp"
#include "brace/world.hpp"

namespace brace {

// Distributes [0, n) over `jobs` threads; results land at their index, so the
// output order is independent of scheduling.
void parallel_for(int n, int jobs, const std::function<void(int)>& body);

// One episode per world; episode i uses rng seed episode_seed_base + i.
std::vector<Trajectory> rollout_worlds(const std::vector<WorldState>& worlds,
                                       const Checkpoint& ckpt, EpisodeConfig cfg,
                                       uint64_t episode_seed_base, int jobs);

struct EvalResult {
  double success_rate = 0.0;
  double mean_steps = 0.0;
  int episodes = 0;
};

EvalResult evaluate(const std::vector<Trajectory>& trajectories);

// Supplies the world for a training episode index (cycling a pool or
// generating on the fly).
using WorldSource = std::function<WorldState(uint64_t episode_index)>;

struct TrainProgress {
  int update = 0;
  double loss = 0.0;
  double kl = 0.0;
  double batch_success = 0.0;
  double batch_reward = 0.0;
};

using ProgressFn = std::function<void(const TrainProgress&)>;

// PPO over the action policy; the belief side is a frozen oracle.
void train_policy(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                  int updates, int batch_size, int jobs,
                  const ProgressFn& progress = nullptr);

// GRPO over the label policy; the action policy is frozen.
void train_belief(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                  int updates, int worlds_per_update, int jobs,
                  const ProgressFn& progress = nullptr);

// Alternates one policy update and one belief update per round.
void train_joint(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                 int updates, int batch_size, int worlds_per_update, int jobs,
                 const ProgressFn& progress = nullptr);

}  // namespace brace

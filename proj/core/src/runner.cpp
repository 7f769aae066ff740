// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/runner.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace brace {
namespace {

double value_of(const PolicyParams& head, const std::vector<double>& features) {
  double v = 0.0;
  for (size_t i = 0; i < head.weights.size() && i < features.size(); ++i)
    v += head.weights[i] * features[i];
  return v;
}

// Extracts policy samples (with GAE advantages and returns) from one episode.
void policy_samples(const Trajectory& traj, const Checkpoint& ckpt,
                    const TrainConfig& cfg, std::vector<StepSample>& out) {
  std::vector<double> rewards, values;
  std::vector<const StepSample*> acting;
  for (const StepRecord& rec : traj.records) {
    if (rec.action.empty()) continue;  // terminal record carries no action
    rewards.push_back(rec.env_reward);
    values.push_back(value_of(ckpt.value_head, rec.action_sample.value_features));
    acting.push_back(&rec.action_sample);
  }
  if (acting.empty()) return;
  values.push_back(0.0);
  std::vector<double> adv = gae_advantages(rewards, values, cfg.gamma, cfg.gae_lambda);
  double ret = 0.0;
  std::vector<double> returns(rewards.size());
  for (size_t i = rewards.size(); i-- > 0;) {
    ret = rewards[i] + cfg.gamma * ret;
    returns[i] = ret;
  }
  for (size_t i = 0; i < acting.size(); ++i) {
    StepSample s = *acting[i];
    s.advantage = adv[i];
    s.target_return = returns[i];
    out.push_back(std::move(s));
  }
}

}  // namespace

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&next, n, &body] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

std::vector<Trajectory> rollout_worlds(const std::vector<WorldState>& worlds,
                                       const Checkpoint& ckpt, EpisodeConfig cfg,
                                       uint64_t episode_seed_base, int jobs) {
  std::vector<Trajectory> out(worlds.size());
  parallel_for(static_cast<int>(worlds.size()), jobs, [&](int i) {
    EpisodeConfig ec = cfg;
    ec.rng_seed = episode_seed_base + static_cast<uint64_t>(i);
    out[static_cast<size_t>(i)] = run_episode(worlds[static_cast<size_t>(i)], ckpt, ec);
  });
  return out;
}

EvalResult evaluate(const std::vector<Trajectory>& trajectories) {
  EvalResult r;
  r.episodes = static_cast<int>(trajectories.size());
  if (r.episodes == 0) return r;
  for (const Trajectory& t : trajectories) {
    r.success_rate += t.success ? 1.0 : 0.0;
    r.mean_steps += t.steps;
  }
  r.success_rate /= r.episodes;
  r.mean_steps /= r.episodes;
  return r;
}

void train_policy(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                  int updates, int batch_size, int jobs, const ProgressFn& progress) {
  for (int u = 0; u < updates; ++u) {
    std::vector<Trajectory> batch(static_cast<size_t>(batch_size));
    parallel_for(batch_size, jobs, [&](int b) {
      uint64_t index = static_cast<uint64_t>(u) * batch_size + static_cast<uint64_t>(b);
      WorldState w = worlds(index);
      EpisodeConfig ec;
      ec.belief_mode = BeliefMode::Oracle;
      ec.score_rewards = false;
      ec.rng_seed = 0x5DEECE66Dull + index;
      batch[static_cast<size_t>(b)] = run_episode(w, ckpt, ec);
    });

    std::vector<StepSample> samples;
    double succ = 0.0;
    for (const Trajectory& t : batch) {
      policy_samples(t, ckpt, cfg, samples);
      succ += t.success ? 1.0 : 0.0;
    }
    LossResult pl = ppo_loss(ckpt.action_policy, samples, cfg, /*dual_clip=*/false);
    sgd_step(ckpt.action_policy, pl.gradient, cfg.lr_policy);
    LossResult vl = value_loss(ckpt.value_head, samples);
    sgd_step(ckpt.value_head, vl.gradient, cfg.lr_value);
    ++ckpt.updates;

    if (progress)
      progress({u + 1, pl.loss, pl.kl, succ / batch_size, 0.0});
  }
}

void train_belief(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                  int updates, int worlds_per_update, int jobs,
                  const ProgressFn& progress) {
  int group = std::max(1, cfg.group_size);
  for (int u = 0; u < updates; ++u) {
    int total = worlds_per_update * group;
    std::vector<Trajectory> rolls(static_cast<size_t>(total));
    parallel_for(total, jobs, [&](int i) {
      int g = i / group;
      uint64_t index = static_cast<uint64_t>(u) * worlds_per_update +
                       static_cast<uint64_t>(g);
      WorldState w = worlds(index);
      EpisodeConfig ec;
      ec.belief_mode = BeliefMode::LabelPolicy;
      ec.gamma_belief = cfg.gamma_belief;
      ec.rng_seed = 0x9E3779B9ull + static_cast<uint64_t>(u) * total +
                    static_cast<uint64_t>(i);
      rolls[static_cast<size_t>(i)] = run_episode(w, ckpt, ec);
    });

    // Composite belief rewards are normalized per (world, step) across the
    // group's rollouts; each claim sample at that step inherits the advantage.
    std::vector<StepSample> samples;
    double reward_sum = 0.0;
    int reward_n = 0;
    for (int g = 0; g < worlds_per_update; ++g) {
      Trajectory* members = &rolls[static_cast<size_t>(g * group)];
      size_t max_len = 0;
      for (int k = 0; k < group; ++k)
        max_len = std::max(max_len, members[k].records.size());
      for (size_t s = 0; s < max_len; ++s) {
        std::vector<double> rewards;
        std::vector<int> who;
        for (int k = 0; k < group; ++k) {
          if (s >= members[k].records.size()) continue;
          rewards.push_back(members[k].records[s].reward.composite);
          who.push_back(k);
        }
        std::vector<double> adv = group_normalized_advantages(rewards, cfg.std_floor);
        for (size_t i = 0; i < who.size(); ++i) {
          reward_sum += rewards[i];
          ++reward_n;
          for (StepSample& smp :
               members[static_cast<size_t>(who[i])].records[s].label_samples) {
            smp.advantage = adv[i];
            samples.push_back(smp);
          }
        }
      }
    }
    LossResult pl = ppo_loss(ckpt.label_policy, samples, cfg, cfg.use_dual_clip);
    sgd_step(ckpt.label_policy, pl.gradient, cfg.lr_belief);
    ++ckpt.updates;

    if (progress)
      progress({u + 1, pl.loss, pl.kl, 0.0, reward_n ? reward_sum / reward_n : 0.0});
  }
}

void train_joint(const WorldSource& worlds, Checkpoint& ckpt, const TrainConfig& cfg,
                 int updates, int batch_size, int worlds_per_update, int jobs,
                 const ProgressFn& progress) {
  for (int u = 0; u < updates; ++u) {
    train_policy(worlds, ckpt, cfg, 1, batch_size, jobs, nullptr);
    --ckpt.updates;  // count the alternating pair as one joint update
    train_belief(worlds, ckpt, cfg, 1, worlds_per_update, jobs,
                 progress ? [&](const TrainProgress& p) {
                   TrainProgress q = p;
                   q.update = u + 1;
                   progress(q);
                 } : ProgressFn(nullptr));
  }
}

}  // namespace brace

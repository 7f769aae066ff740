// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "brace/reward.hpp"
#include "brace/rl.hpp"
#include "brace/wep.hpp"
#include "brace/world.hpp"

namespace brace {

inline constexpr int kEvidenceDim = 13;   // observed + 5 buckets + contradicted + 6 slots
inline constexpr int kLabelFeatureDim = kNumWepLevels * kEvidenceDim;
inline constexpr int kActionFeatureDim = 14;  // 9 verbs + 5 context bits
inline constexpr int kValueFeatureDim = 4;

// The agent's own record of what it has seen. Everything here is rebuilt from
// observations and chosen actions alone; the latent WorldState never enters.
struct ObservationLog {
  struct Entry {
    int last_turn = -1;
    std::string predicate;  // normalized
    bool contradicted = false;
  };
  std::map<std::pair<Slot, std::string>, Entry> entries;
  std::set<std::pair<std::string, std::string>> traversed;  // (room, direction)
  std::string current_room;
  std::string last_action;
  int turn = -1;

  void observe(const Observation& obs);      // call once per step, before updates
  void note_action(const ActionCommand& a);  // call when the action is chosen
};

// Parsed form of a goal string.
struct GoalSpec {
  std::vector<std::string> steps;         // rendered step phrases
  std::vector<std::string> object_names;  // objects/doors the steps mention
  int quest_length = 0;
  bool treasure = false;
};

GoalSpec parse_goal(const std::string& goal_text);

// Deterministic claim-content rules shared by the oracle and the label policy.
struct ContentUpdate {
  BeliefState belief;                  // labels not yet assigned
  std::vector<bool> observed_now;      // per claim
  std::vector<bool> placeholder;       // per claim: never observed, goal-derived
};

ContentUpdate update_content(const GoalSpec& goal, const BeliefState& prev,
                             const Observation& obs);

std::vector<double> evidence_features(const Claim& claim, bool observed_now,
                                      const ObservationLog& log);

// 7 candidate rows: level l occupies block l of the weight vector.
std::vector<std::vector<double>> label_candidates(const std::vector<double>& evidence);

BeliefState oracle_update(const GoalSpec& goal, const BeliefState& prev,
                          const Observation& obs, bool force_confirmed = false);

struct LabeledUpdate {
  BeliefState belief;
  std::vector<StepSample> samples;  // one per claim; advantage filled by trainer
};

LabeledUpdate label_policy_update(const GoalSpec& goal, const BeliefState& prev,
                                  const Observation& obs, const ObservationLog& log,
                                  const PolicyParams& params, std::mt19937_64& rng,
                                  double temperature = 1.0, bool greedy = false);

std::vector<std::vector<double>> action_features(const GoalSpec& goal,
                                                 const BeliefState& belief,
                                                 const ObservationLog& log,
                                                 const std::vector<ActionCommand>& candidates);

struct ActionChoice {
  int index = 0;
  double log_prob = 0.0;
  std::vector<std::vector<double>> features;
};

ActionChoice action_policy(const GoalSpec& goal, const BeliefState& belief,
                           const ObservationLog& log,
                           const std::vector<ActionCommand>& candidates,
                           const PolicyParams& params, std::mt19937_64& rng,
                           double temperature = 1.0, bool greedy = false);

std::vector<double> value_features(const BeliefState& belief, int turn, int max_turns);

int count_words(const std::string& text);

// How the belief side of an episode is produced.
enum class BeliefMode { Oracle, Summary, LabelPolicy };

struct EpisodeConfig {
  BeliefMode belief_mode = BeliefMode::Oracle;
  bool greedy_actions = false;
  bool greedy_labels = false;
  double action_temperature = 1.0;
  double label_temperature = 1.0;
  double gamma_belief = 0.95;
  uint64_t rng_seed = 0;
  bool score_rewards = true;  // compute RewardBreakdown per step
};

struct StepRecord {
  int step = 0;
  std::string observation_text;
  BeliefState belief;
  std::string action;
  double env_reward = 0.0;
  RewardBreakdown reward;
  int context_words_belief = 0;
  int context_words_raw = 0;
  // Per claim: 1 true, 0 false, -1 unverifiable (oracle verdict on the fact).
  std::vector<int> claim_truth;
  std::vector<StepSample> label_samples;
  StepSample action_sample;
};

struct Trajectory {
  uint64_t world_seed = 0;
  std::string goal;
  bool success = false;
  int steps = 0;
  std::vector<StepRecord> records;
};

Trajectory run_episode(const WorldState& world, const Checkpoint& ckpt,
                       const EpisodeConfig& cfg);

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace brace {

struct PolicyParams {
  std::vector<double> weights;
  int feature_dim = 0;

  static PolicyParams zeros(int dim) { return {std::vector<double>(dim, 0.0), dim}; }
};

struct TrainConfig {
  double clip_epsilon = 0.2;
  double gamma = 1.0;
  double gae_lambda = 0.95;
  double lr_policy = 1e-4;
  double lr_belief = 1e-4;
  double lr_value = 1e-3;
  double kl_coeff = 0.01;
  bool kl_penalty = true;
  double dual_clip_c = 3.0;   // belief loss only
  bool use_dual_clip = false;
  int group_size = 8;
  double std_floor = 1e-8;
  int max_updates = 100;
  double gamma_belief = 0.95;
  double eval_temperature = 0.4;
};

// One decision point: a candidate set, the choice made under the rollout-time
// parameters, and its credit.
struct StepSample {
  std::vector<std::vector<double>> features;  // one row per candidate
  int chosen = 0;
  double old_log_prob = 0.0;
  double advantage = 0.0;
  // value-head fields
  std::vector<double> value_features;
  double target_return = 0.0;
};

std::vector<double> softmax_policy(const std::vector<double>& weights,
                                   const std::vector<std::vector<double>>& candidates,
                                   double temperature = 1.0);

double log_prob_of(const std::vector<double>& weights,
                   const std::vector<std::vector<double>>& candidates, int chosen,
                   double temperature = 1.0);

// values has one bootstrap entry beyond rewards (0 at terminal).
std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values,
                                   double gamma, double lambda);

std::vector<double> group_normalized_advantages(const std::vector<double>& rewards,
                                                double std_floor = 1e-8);

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;
  double mean_ratio = 0.0;
  double kl = 0.0;
};

// Clipped surrogate with optional dual-clip and k1 KL penalty. Gradient is
// analytic in the policy weights.
LossResult ppo_loss(const PolicyParams& params, const std::vector<StepSample>& samples,
                    const TrainConfig& cfg, bool dual_clip);

LossResult value_loss(const PolicyParams& value_params,
                      const std::vector<StepSample>& samples);

void sgd_step(PolicyParams& params, const std::vector<double>& gradient, double lr);

struct Checkpoint {
  PolicyParams action_policy;
  PolicyParams label_policy;
  PolicyParams value_head;
  TrainConfig config;
  int updates = 0;
};

void to_json(nlohmann::ordered_json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::ordered_json& j, const Checkpoint& c);
void from_json(const nlohmann::json& j, Checkpoint& c);

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace brace {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// grad log p(chosen) = (x_chosen − Σ_i p_i x_i) / T
std::vector<double> log_prob_gradient(const std::vector<double>& weights,
                                      const std::vector<std::vector<double>>& candidates,
                                      int chosen, double temperature) {
  std::vector<double> probs = softmax_policy(weights, candidates, temperature);
  std::vector<double> grad(weights.size(), 0.0);
  axpy(1.0 / temperature, candidates[static_cast<size_t>(chosen)], grad);
  for (size_t i = 0; i < candidates.size(); ++i)
    axpy(-probs[i] / temperature, candidates[i], grad);
  return grad;
}

}  // namespace

std::vector<double> softmax_policy(const std::vector<double>& weights,
                                   const std::vector<std::vector<double>>& candidates,
                                   double temperature) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  std::vector<double> logits(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    logits[i] = dot(weights, candidates[i]) / temperature;
    if (!std::isfinite(logits[i])) throw std::invalid_argument("non-finite logit");
  }
  double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    z += l;
  }
  for (double& l : logits) l /= z;
  return logits;
}

double log_prob_of(const std::vector<double>& weights,
                   const std::vector<std::vector<double>>& candidates, int chosen,
                   double temperature) {
  std::vector<double> probs = softmax_policy(weights, candidates, temperature);
  return std::log(probs.at(static_cast<size_t>(chosen)));
}

std::vector<double> gae_advantages(const std::vector<double>& rewards,
                                   const std::vector<double>& values,
                                   double gamma, double lambda) {
  if (values.size() != rewards.size() + 1)
    throw std::invalid_argument("values must have one bootstrap entry beyond rewards");
  std::vector<double> adv(rewards.size(), 0.0);
  double running = 0.0;
  for (size_t i = rewards.size(); i-- > 0;) {
    double delta = rewards[i] + gamma * values[i + 1] - values[i];
    running = delta + gamma * lambda * running;
    adv[i] = running;
  }
  return adv;
}

std::vector<double> group_normalized_advantages(const std::vector<double>& rewards,
                                                double std_floor) {
  if (rewards.empty()) return {};
  double mu = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
              static_cast<double>(rewards.size());
  double var = 0.0;
  for (double r : rewards) var += (r - mu) * (r - mu);
  var /= static_cast<double>(rewards.size());  // population variance
  double sigma = std::sqrt(var);
  std::vector<double> adv(rewards.size(), 0.0);
  if (sigma < std_floor) return adv;
  for (size_t i = 0; i < rewards.size(); ++i) adv[i] = (rewards[i] - mu) / sigma;
  return adv;
}

LossResult ppo_loss(const PolicyParams& params, const std::vector<StepSample>& samples,
                    const TrainConfig& cfg, bool dual_clip) {
  LossResult out;
  out.gradient.assign(params.weights.size(), 0.0);
  if (samples.empty()) return out;

  double n = static_cast<double>(samples.size());
  for (const StepSample& s : samples) {
    double new_lp = log_prob_of(params.weights, s.features, s.chosen);
    double ratio = std::exp(new_lp - s.old_log_prob);
    double a = s.advantage;

    double unclipped = ratio * a;
    double clipped =
        std::clamp(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon) * a;
    bool take_unclipped = unclipped <= clipped;
    double surrogate = take_unclipped ? unclipped : clipped;
    bool grad_active = take_unclipped;
    if (dual_clip && a < 0.0 && cfg.dual_clip_c * a > surrogate) {
      surrogate = cfg.dual_clip_c * a;
      grad_active = false;
    }

    out.loss -= surrogate / n;
    out.mean_ratio += ratio / n;
    std::vector<double> dlp = log_prob_gradient(params.weights, s.features, s.chosen, 1.0);
    if (grad_active) axpy(-ratio * a / n, dlp, out.gradient);

    if (cfg.kl_penalty) {
      double k1 = s.old_log_prob - new_lp;
      out.kl += k1 / n;
      out.loss += cfg.kl_coeff * k1 / n;
      axpy(-cfg.kl_coeff / n, dlp, out.gradient);
    }
  }
  return out;
}

LossResult value_loss(const PolicyParams& value_params,
                      const std::vector<StepSample>& samples) {
  LossResult out;
  out.gradient.assign(value_params.weights.size(), 0.0);
  if (samples.empty()) return out;
  double n = static_cast<double>(samples.size());
  for (const StepSample& s : samples) {
    double v = dot(value_params.weights, s.value_features);
    double err = v - s.target_return;
    out.loss += err * err / n;
    axpy(2.0 * err / n, s.value_features, out.gradient);
  }
  return out;
}

void sgd_step(PolicyParams& params, const std::vector<double>& gradient, double lr) {
  for (size_t i = 0; i < params.weights.size(); ++i)
    params.weights[i] -= lr * gradient[i];
}

void to_json(nlohmann::ordered_json& j, const TrainConfig& c) {
  j = nlohmann::ordered_json{{"clip_epsilon", c.clip_epsilon},
                             {"gamma", c.gamma},
                             {"gae_lambda", c.gae_lambda},
                             {"lr_policy", c.lr_policy},
                             {"lr_belief", c.lr_belief},
                             {"lr_value", c.lr_value},
                             {"kl_coeff", c.kl_coeff},
                             {"kl_penalty", c.kl_penalty},
                             {"dual_clip_c", c.dual_clip_c},
                             {"use_dual_clip", c.use_dual_clip},
                             {"group_size", c.group_size},
                             {"std_floor", c.std_floor},
                             {"max_updates", c.max_updates},
                             {"gamma_belief", c.gamma_belief},
                             {"eval_temperature", c.eval_temperature}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.clip_epsilon = j.value("clip_epsilon", d.clip_epsilon);
  c.gamma = j.value("gamma", d.gamma);
  c.gae_lambda = j.value("gae_lambda", d.gae_lambda);
  c.lr_policy = j.value("lr_policy", d.lr_policy);
  c.lr_belief = j.value("lr_belief", d.lr_belief);
  c.lr_value = j.value("lr_value", d.lr_value);
  c.kl_coeff = j.value("kl_coeff", d.kl_coeff);
  c.kl_penalty = j.value("kl_penalty", d.kl_penalty);
  c.dual_clip_c = j.value("dual_clip_c", d.dual_clip_c);
  c.use_dual_clip = j.value("use_dual_clip", d.use_dual_clip);
  c.group_size = j.value("group_size", d.group_size);
  c.std_floor = j.value("std_floor", d.std_floor);
  c.max_updates = j.value("max_updates", d.max_updates);
  c.gamma_belief = j.value("gamma_belief", d.gamma_belief);
  c.eval_temperature = j.value("eval_temperature", d.eval_temperature);
}

namespace {

nlohmann::ordered_json params_to_json(const PolicyParams& p) {
  return nlohmann::ordered_json{{"feature_dim", p.feature_dim}, {"weights", p.weights}};
}

PolicyParams params_from_json(const nlohmann::json& j) {
  PolicyParams p;
  p.feature_dim = j.value("feature_dim", 0);
  p.weights = j.value("weights", std::vector<double>{});
  return p;
}

}  // namespace

void to_json(nlohmann::ordered_json& j, const Checkpoint& c) {
  nlohmann::ordered_json cfg;
  to_json(cfg, c.config);
  j = nlohmann::ordered_json{{"action_policy", params_to_json(c.action_policy)},
                             {"label_policy", params_to_json(c.label_policy)},
                             {"value_head", params_to_json(c.value_head)},
                             {"config", std::move(cfg)},
                             {"updates", c.updates}};
}

void from_json(const nlohmann::json& j, Checkpoint& c) {
  c.action_policy = params_from_json(j.at("action_policy"));
  c.label_policy = params_from_json(j.at("label_policy"));
  c.value_head = params_from_json(j.at("value_head"));
  if (j.contains("config")) from_json(j.at("config"), c.config);
  c.updates = j.value("updates", 0);
}

}  // namespace brace

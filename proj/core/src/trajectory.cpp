// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/trajectory.hpp"

#include <istream>
#include <map>
#include <ostream>

namespace brace {

nlohmann::ordered_json step_record_to_json(int episode_id, const std::string& goal,
                                           const StepRecord& rec) {
  nlohmann::ordered_json belief = nlohmann::ordered_json::array();
  for (const Claim& c : rec.belief.claims) {
    nlohmann::ordered_json cj;
    to_json(cj, c);
    belief.push_back(std::move(cj));
  }
  nlohmann::ordered_json reward;
  to_json(reward, rec.reward);
  return nlohmann::ordered_json{{"episode_id", episode_id},
                                {"step", rec.step},
                                {"goal", goal},
                                {"observation_text", rec.observation_text},
                                {"belief", std::move(belief)},
                                {"action", rec.action},
                                {"env_reward", rec.env_reward},
                                {"reward_breakdown", std::move(reward)},
                                {"context_words_belief", rec.context_words_belief},
                                {"context_words_raw", rec.context_words_raw},
                                {"claim_truth", rec.claim_truth}};
}

void write_trajectory(std::ostream& out, int episode_id, const Trajectory& traj) {
  for (const StepRecord& rec : traj.records)
    out << step_record_to_json(episode_id, traj.goal, rec).dump() << '\n';
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
  std::map<int, Trajectory> by_episode;
  std::vector<int> order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    if (j.contains("meta")) continue;
    int id = j.value("episode_id", 0);
    if (!by_episode.count(id)) order.push_back(id);
    Trajectory& traj = by_episode[id];
    traj.goal = j.value("goal", traj.goal);

    StepRecord rec;
    rec.step = j.value("step", 0);
    rec.observation_text = j.value("observation_text", "");
    for (const auto& cj : j.value("belief", nlohmann::json::array())) {
      Claim c;
      from_json(cj, c);
      rec.belief.claims.push_back(std::move(c));
    }
    rec.belief.step_index = rec.step;
    rec.action = j.value("action", "");
    rec.env_reward = j.value("env_reward", 0.0);
    if (j.contains("reward_breakdown")) from_json(j.at("reward_breakdown"), rec.reward);
    rec.context_words_belief = j.value("context_words_belief", 0);
    rec.context_words_raw = j.value("context_words_raw", 0);
    rec.claim_truth = j.value("claim_truth", std::vector<int>{});
    traj.records.push_back(std::move(rec));
  }
  std::vector<Trajectory> out;
  out.reserve(order.size());
  for (int id : order) {
    Trajectory& traj = by_episode[id];
    traj.steps = static_cast<int>(traj.records.size()) - 1;
    traj.success = !traj.records.empty() && traj.records.back().env_reward > 0.5;
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/agents.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <sstream>

namespace brace {
namespace {

constexpr const char* kVerbs[] = {"go",     "open", "close",  "take", "drop",
                                  "put",    "unlock", "look", "inventory"};
constexpr int kNumVerbs = 9;

int verb_index(const std::string& verb) {
  for (int i = 0; i < kNumVerbs; ++i)
    if (verb == kVerbs[i]) return i;
  return -1;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

// "take the brass key" -> ("take", {"brass key"}) etc. Returns the rendered
// action text the step calls for ("" when no single action matches, e.g.
// reach), plus the object the step is about.
struct StepTarget {
  std::string action;   // exact rendered action, or prefix for unlock
  bool prefix = false;
  std::string object;
};

StepTarget step_target(const std::string& step) {
  StepTarget t;
  auto strip = [](const std::string& s) {
    return starts_with(s, "the ") ? s.substr(4) : s;
  };
  if (starts_with(step, "take ")) {
    t.object = strip(step.substr(5));
    t.action = "take " + t.object;
  } else if (starts_with(step, "open ")) {
    t.object = strip(step.substr(5));
    t.action = "open " + t.object;
  } else if (starts_with(step, "unlock ")) {
    t.object = strip(step.substr(7));
    t.action = "unlock " + t.object + " with ";
    t.prefix = true;
  } else if (starts_with(step, "put ")) {
    std::string rest = strip(step.substr(4));
    size_t sep = rest.find(" in ");
    if (sep != std::string::npos) {
      t.object = rest.substr(0, sep);
      std::string box = strip(rest.substr(sep + 4));
      t.action = "put " + t.object + " in " + box;
    }
  }
  return t;
}

// Next unsatisfied quest step index according to the belief, or -1 when the
// belief says the quest is complete.
int believed_next_step(const GoalSpec& goal, const BeliefState& belief) {
  const Claim* progress = nullptr;
  for (const Claim& c : belief.claims)
    if (c.slot == Slot::Progress && c.subject == "quest") progress = &c;
  if (goal.treasure) {
    if (progress && normalize_phrase(progress->predicate) == "target obtained")
      return -1;
    return 0;
  }
  int k = 0;
  if (progress) {
    std::istringstream stream(progress->predicate);
    stream >> k;
  }
  return k >= static_cast<int>(goal.steps.size()) ? -1 : k;
}

}  // namespace

void ObservationLog::observe(const Observation& obs) {
  ++turn;
  for (const Fact& f : obs.facts) {
    std::string pred = normalize_phrase(f.predicate);
    Entry& e = entries[{f.slot, f.subject}];
    if (e.last_turn >= 0 && e.predicate != pred) e.contradicted = true;
    e.last_turn = turn;
    e.predicate = pred;
    if (f.slot == Slot::Location && f.subject == "player" &&
        starts_with(f.predicate, "in the "))
      current_room = f.predicate.substr(7);
  }
}

void ObservationLog::note_action(const ActionCommand& a) {
  if (a.verb == "go" && !a.args.empty()) traversed.insert({current_room, a.args[0]});
  last_action = a.rendered;
}

GoalSpec parse_goal(const std::string& goal_text) {
  GoalSpec goal;
  if (starts_with(goal_text, "Find the ")) {
    goal.treasure = true;
    size_t end = goal_text.find(" and take it.");
    std::string target = goal_text.substr(9, end == std::string::npos
                                                  ? std::string::npos
                                                  : end - 9);
    goal.steps = {"take the " + target};
    goal.object_names = {target};
    goal.quest_length = 1;
    return goal;
  }
  // "Your quest: 1. reach the pantry. 2. take the brass key."
  size_t pos = 0;
  int n = 1;
  while (true) {
    std::string tag = " " + std::to_string(n) + ". ";
    size_t start = goal_text.find(tag, pos);
    if (start == std::string::npos) break;
    start += tag.size();
    std::string next_tag = " " + std::to_string(n + 1) + ". ";
    size_t end = goal_text.find(next_tag, start);
    std::string step = goal_text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    while (!step.empty() && (step.back() == '.' || step.back() == ' ')) step.pop_back();
    goal.steps.push_back(step);
    pos = start;
    ++n;
  }
  goal.quest_length = static_cast<int>(goal.steps.size());
  for (const std::string& step : goal.steps) {
    StepTarget t = step_target(step);
    if (!t.object.empty()) goal.object_names.push_back(t.object);
    if (starts_with(step, "put ")) {  // the receiving container too
      size_t sep = step.find(" in the ");
      if (sep != std::string::npos) {
        std::string box = step.substr(sep + 8);
        if (!box.empty()) goal.object_names.push_back(box);
      }
    }
  }
  return goal;
}

ContentUpdate update_content(const GoalSpec& goal, const BeliefState& prev,
                             const Observation& obs) {
  ContentUpdate out;
  out.belief.claims = prev.claims;
  out.observed_now.assign(prev.claims.size(), false);
  out.placeholder.assign(prev.claims.size(), false);

  auto upsert = [&out](Slot slot, const std::string& subject,
                       const std::string& predicate, bool placeholder) {
    for (size_t i = 0; i < out.belief.claims.size(); ++i) {
      Claim& c = out.belief.claims[i];
      if (c.slot == slot && c.subject == subject) {
        if (!placeholder) {
          c.predicate = predicate;
          c.canonical = true;
          out.observed_now[i] = true;
        }
        return;
      }
    }
    if (placeholder) {
      out.belief.claims.push_back(make_claim(slot, subject, predicate, WepLevel::Unknown));
      out.observed_now.push_back(false);
      out.placeholder.push_back(true);
    } else {
      out.belief.claims.push_back(make_claim(slot, subject, predicate, WepLevel::Confirmed));
      out.observed_now.push_back(true);
      out.placeholder.push_back(false);
    }
  };

  for (const Fact& f : obs.facts) upsert(f.slot, f.subject, f.predicate, false);

  // Goal objects not yet sighted get a checkable existence placeholder.
  for (const std::string& name : goal.object_names)
    upsert(Slot::ObjectState, name, "exists, location not yet determined", true);

  upsert(Slot::Progress, "quest",
         goal.treasure ? "target not obtained"
                       : "0 of " + std::to_string(goal.quest_length) +
                             " quest steps completed",
         true);

  // Any mandatory slot still dark gets an unverifiable stub so the format
  // gate's coverage rule holds from the first step.
  auto covered = [&out](Slot slot) {
    for (const Claim& c : out.belief.claims)
      if (c.slot == slot) return true;
    return false;
  };
  if (!covered(Slot::Location)) upsert(Slot::Location, "player", "position not yet determined", true);
  if (!covered(Slot::Exit)) upsert(Slot::Exit, "unexplored passages", "not yet charted", true);
  if (!covered(Slot::ObjectState)) upsert(Slot::ObjectState, "surroundings", "not yet examined", true);
  if (!covered(Slot::Inventory)) upsert(Slot::Inventory, "belongings", "not yet checked", true);

  // Claim-cap eviction: drop the oldest non-essential claims first. Keeps the
  // belief inside the format gate on very large worlds.
  while (static_cast<int>(out.belief.claims.size()) > kDefaultClaimCap) {
    int victim = -1;
    for (size_t i = 0; i < out.belief.claims.size(); ++i) {
      const Claim& c = out.belief.claims[i];
      if (out.observed_now[i] || out.placeholder[i]) continue;
      if (c.slot == Slot::Location || c.slot == Slot::Inventory ||
          c.slot == Slot::Progress)
        continue;
      victim = static_cast<int>(i);
      break;
    }
    if (victim < 0) break;
    out.belief.claims.erase(out.belief.claims.begin() + victim);
    out.observed_now.erase(out.observed_now.begin() + victim);
    out.placeholder.erase(out.placeholder.begin() + victim);
  }

  out.belief.step_index = prev.step_index + 1;
  return out;
}

std::vector<double> evidence_features(const Claim& claim, bool observed_now,
                                      const ObservationLog& log) {
  std::vector<double> f(kEvidenceDim, 0.0);
  auto it = log.entries.find({claim.slot, claim.subject});
  bool seen = it != log.entries.end() &&
              it->second.predicate == normalize_phrase(claim.predicate);
  f[0] = observed_now ? 1.0 : 0.0;
  int bucket;  // 1..5: this turn, last turn, 2-4, >=5, never
  if (!seen) {
    bucket = 5;
  } else {
    int delta = log.turn - it->second.last_turn;
    bucket = delta <= 0 ? 1 : delta == 1 ? 2 : delta <= 4 ? 3 : 4;
  }
  f[static_cast<size_t>(bucket)] = 1.0;
  f[6] = (it != log.entries.end() && it->second.contradicted) ? 1.0 : 0.0;
  f[7 + static_cast<size_t>(claim.slot)] = 1.0;
  return f;
}

std::vector<std::vector<double>> label_candidates(const std::vector<double>& evidence) {
  std::vector<std::vector<double>> rows(kNumWepLevels,
                                        std::vector<double>(kLabelFeatureDim, 0.0));
  for (int level = 0; level < kNumWepLevels; ++level)
    for (int i = 0; i < kEvidenceDim; ++i)
      rows[static_cast<size_t>(level)][static_cast<size_t>(level * kEvidenceDim + i)] =
          evidence[static_cast<size_t>(i)];
  return rows;
}

BeliefState oracle_update(const GoalSpec& goal, const BeliefState& prev,
                          const Observation& obs, bool force_confirmed) {
  ContentUpdate u = update_content(goal, prev, obs);
  for (size_t i = 0; i < u.belief.claims.size(); ++i) {
    Claim& c = u.belief.claims[i];
    WepLevel label;
    if (force_confirmed) {
      label = WepLevel::Confirmed;
    } else if (u.observed_now[i]) {
      label = WepLevel::Confirmed;
    } else if (i < u.placeholder.size() && u.placeholder[i] &&
               i >= prev.claims.size()) {
      label = WepLevel::Unknown;  // newly introduced placeholder
    } else {
      // Aging: a confirmed claim not re-observed decays one level, then holds.
      label = c.label == WepLevel::Confirmed ? WepLevel::AlmostCertain : c.label;
    }
    c = make_claim(c.slot, c.subject, c.predicate, label);
  }
  u.belief.step_index = prev.step_index + 1;
  return u.belief;
}

LabeledUpdate label_policy_update(const GoalSpec& goal, const BeliefState& prev,
                                  const Observation& obs, const ObservationLog& log,
                                  const PolicyParams& params, std::mt19937_64& rng,
                                  double temperature, bool greedy) {
  ContentUpdate u = update_content(goal, prev, obs);
  LabeledUpdate out;
  for (size_t i = 0; i < u.belief.claims.size(); ++i) {
    Claim& c = u.belief.claims[i];
    auto candidates = label_candidates(evidence_features(c, u.observed_now[i], log));
    std::vector<double> probs = softmax_policy(params.weights, candidates, temperature);
    int chosen;
    if (greedy) {
      chosen = static_cast<int>(
          std::max_element(probs.begin(), probs.end()) - probs.begin());
    } else {
      chosen = sample_index(probs, rng);
    }
    StepSample sample;
    sample.features = std::move(candidates);
    sample.chosen = chosen;
    sample.old_log_prob = std::log(probs[static_cast<size_t>(chosen)]);
    out.samples.push_back(std::move(sample));
    c = make_claim(c.slot, c.subject, c.predicate, wep_from_rank(chosen));
  }
  out.belief = std::move(u.belief);
  out.belief.step_index = prev.step_index + 1;
  return out;
}

std::vector<std::vector<double>> action_features(
    const GoalSpec& goal, const BeliefState& belief, const ObservationLog& log,
    const std::vector<ActionCommand>& candidates) {
  int next = believed_next_step(goal, belief);
  StepTarget target;
  if (next >= 0) target = step_target(goal.steps[static_cast<size_t>(next)]);

  std::vector<std::vector<double>> rows;
  rows.reserve(candidates.size());
  for (const ActionCommand& a : candidates) {
    std::vector<double> f(kActionFeatureDim, 0.0);
    int v = verb_index(a.verb);
    if (v >= 0) f[static_cast<size_t>(v)] = 1.0;
    if (a.verb == "go" && !a.args.empty() &&
        !log.traversed.count({log.current_room, a.args[0]}))
      f[9] = 1.0;
    bool matches = !target.action.empty() &&
                   (target.prefix ? starts_with(a.rendered, target.action)
                                  : a.rendered == target.action);
    if (matches) {
      f[10] = 1.0;
      for (const Claim& c : belief.claims)
        if (c.slot == Slot::ObjectState && c.subject == target.object)
          f[11] = wep_rank(c.label) / 6.0;
    }
    if (a.verb == "unlock") f[12] = 1.0;
    if (a.rendered == log.last_action) f[13] = 1.0;
    rows.push_back(std::move(f));
  }
  return rows;
}

ActionChoice action_policy(const GoalSpec& goal, const BeliefState& belief,
                           const ObservationLog& log,
                           const std::vector<ActionCommand>& candidates,
                           const PolicyParams& params, std::mt19937_64& rng,
                           double temperature, bool greedy) {
  assert(!candidates.empty());
  ActionChoice choice;
  choice.features = action_features(goal, belief, log, candidates);
  std::vector<double> probs = softmax_policy(params.weights, choice.features, temperature);
  if (greedy) {
    int best = 0;
    for (size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[static_cast<size_t>(best)] + 1e-12 ||
          (std::abs(probs[i] - probs[static_cast<size_t>(best)]) <= 1e-12 &&
           candidates[i].rendered < candidates[static_cast<size_t>(best)].rendered))
        best = static_cast<int>(i);
    }
    choice.index = best;
  } else {
    choice.index = sample_index(probs, rng);
  }
  choice.log_prob = std::log(probs[static_cast<size_t>(choice.index)]);
  return choice;
}

std::vector<double> value_features(const BeliefState& belief, int turn, int max_turns) {
  double satisfied = 0.0;
  for (const Claim& c : belief.claims) {
    if (c.slot != Slot::Progress) continue;
    std::string pred = normalize_phrase(c.predicate);
    if (pred == "target obtained") {
      satisfied = 1.0;
    } else {
      std::istringstream stream(c.predicate);
      int k = 0, q = 1;
      std::string of;
      if (stream >> k >> of >> q && q > 0)
        satisfied = static_cast<double>(k) / q;
    }
  }
  return {1.0, max_turns > 0 ? static_cast<double>(turn) / max_turns : 0.0,
          satisfied,
          static_cast<double>(belief.claims.size()) / kDefaultClaimCap};
}

int count_words(const std::string& text) {
  std::istringstream stream(text);
  std::string word;
  int n = 0;
  while (stream >> word) ++n;
  return n;
}

Trajectory run_episode(const WorldState& world, const Checkpoint& ckpt,
                       const EpisodeConfig& cfg) {
  Trajectory traj;
  traj.world_seed = world.rng_seed;
  traj.goal = world.goal_text;

  GoalSpec goal = parse_goal(world.goal_text);
  std::mt19937_64 rng(cfg.rng_seed);
  ObservationLog log;
  FactHistory history;
  BeliefState belief;
  belief.step_index = -1;

  WorldState state = world;
  Observation obs = initial_observation(state);
  int raw_words = count_words(world.goal_text);
  int goal_words = raw_words;

  auto update_belief = [&](const Observation& o, std::vector<StepSample>* samples) {
    BeliefState prev = belief;
    switch (cfg.belief_mode) {
      case BeliefMode::Oracle:
        belief = oracle_update(goal, prev, o);
        break;
      case BeliefMode::Summary:
        belief = oracle_update(goal, prev, o, /*force_confirmed=*/true);
        break;
      case BeliefMode::LabelPolicy: {
        LabeledUpdate u = label_policy_update(goal, prev, o, log, ckpt.label_policy,
                                              rng, cfg.label_temperature,
                                              cfg.greedy_labels);
        belief = std::move(u.belief);
        if (samples) *samples = std::move(u.samples);
        break;
      }
    }
    return prev;
  };

  TerminalState terminal = TerminalState::None;
  while (true) {
    log.observe(obs);
    history.record(obs);
    raw_words += count_words(obs.text);

    StepRecord rec;
    rec.step = log.turn;
    rec.observation_text = obs.text;

    BeliefState prev = update_belief(obs, &rec.label_samples);
    rec.belief = belief;
    rec.context_words_belief =
        goal_words + count_words(render_belief(belief)) + count_words(obs.text);
    rec.context_words_raw = raw_words;

    if (cfg.score_rewards) {
      rec.reward = score_belief(prev, obs, belief, state, history, log.turn,
                                state.success(), cfg.gamma_belief);
      for (const Claim& c : belief.claims) {
        auto verdict = c.canonical
                           ? evaluate_fact(state, {c.slot, c.subject, c.predicate})
                           : std::nullopt;
        rec.claim_truth.push_back(verdict ? (*verdict ? 1 : 0) : -1);
      }
    }

    if (terminal != TerminalState::None || log.turn >= state.max_turns) {
      rec.env_reward = terminal == TerminalState::Success ? 1.0 : 0.0;
      traj.records.push_back(std::move(rec));
      break;
    }

    std::vector<ActionCommand> candidates = admissible_actions(state);
    ActionChoice choice = action_policy(goal, belief, log, candidates,
                                        ckpt.action_policy, rng,
                                        cfg.action_temperature, cfg.greedy_actions);
    const ActionCommand& action = candidates[static_cast<size_t>(choice.index)];
    log.note_action(action);
    raw_words += count_words(action.rendered);

    rec.action = action.rendered;
    rec.action_sample.features = std::move(choice.features);
    rec.action_sample.chosen = choice.index;
    rec.action_sample.old_log_prob = choice.log_prob;
    rec.action_sample.value_features = value_features(belief, log.turn, state.max_turns);

    auto [next_state, next_obs] = step(state, action);
    terminal = next_obs.terminal;
    rec.env_reward = terminal == TerminalState::Success ? 1.0 : 0.0;
    traj.records.push_back(std::move(rec));

    state = std::move(next_state);
    obs = std::move(next_obs);
    if (terminal == TerminalState::None && state.turn >= state.max_turns)
      terminal = TerminalState::Failure;
  }

  traj.success = state.success();
  traj.steps = state.turn;
  return traj;
}

}  // namespace brace

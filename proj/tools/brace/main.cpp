// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: world generation, rollouts, training, evaluation,
// analytics, an interactive episode, and the NDJSON reward server.

#include <atomic>
#include <filesystem>
#include <thread>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "brace/agents.hpp"
#include "brace/analytics.hpp"
#include "brace/log.hpp"
#include "brace/protocol.hpp"
#include "brace/rl.hpp"
#include "brace/runner.hpp"
#include "brace/trajectory.hpp"
#include "brace/world.hpp"

namespace fs = std::filesystem;
using brace::log_info;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr uint64_t kTrainBaseSeed = 10000;
constexpr uint64_t kValBaseSeed = 20000;
constexpr uint64_t kTestBaseSeed = 30000;

json default_config() {
  brace::TrainConfig tc;
  ordered_json tj;
  to_json(tj, tc);
  return json{{"family", "quest"},
              {"curriculum", {"2:3:3", "2:4:4", "4:4:4", "4:6:6"}},
              {"treasure_levels", {1, 2, 3}},
              {"max_turns", 15},
              {"split", "train"},
              {"batch_size", 16},
              {"worlds_per_update", 4},
              {"world_pool", 1000},
              {"jobs", 0},
              {"belief_mode", "oracle"},
              {"greedy_actions", false},
              {"greedy_labels", false},
              {"action_temperature", 1.0},
              {"label_temperature", 1.0},
              {"train", json::parse(tj.dump())}};
}

json load_config(const std::string& path, const std::vector<std::string>& sets) {
  json cfg = default_config();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + path);
    json user = json::parse(in);
    cfg.merge_patch(user);
  }
  for (const std::string& kv : sets) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--set", "expected key=value, got " + kv);
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    json parsed = json::parse(val, nullptr, false);
    json* node = &cfg;
    size_t pos = 0, dot;
    while ((dot = key.find('.', pos)) != std::string::npos) {
      node = &(*node)[key.substr(pos, dot - pos)];
      pos = dot + 1;
    }
    (*node)[key.substr(pos)] = parsed.is_discarded() ? json(val) : parsed;
  }
  return cfg;
}

brace::TrainConfig train_config(const json& cfg) {
  brace::TrainConfig tc;
  if (cfg.contains("train")) from_json(cfg.at("train"), tc);
  return tc;
}

uint64_t split_base_seed(const std::string& split) {
  if (split == "val") return kValBaseSeed;
  if (split == "test") return kTestBaseSeed;
  return kTrainBaseSeed;
}

brace::EnvConfig env_for_index(const json& cfg, uint64_t base_seed, uint64_t index,
                               int max_turns) {
  std::string family = cfg.value("family", "quest");
  if (family == "treasure") {
    auto levels = cfg.value("treasure_levels", std::vector<int>{1});
    int level = levels[index % levels.size()];
    return brace::EnvConfig::treasure(level, base_seed + index, max_turns);
  }
  auto rows = cfg.value("curriculum", std::vector<std::string>{"2:3:3"});
  const std::string& row = rows[index % rows.size()];
  return brace::EnvConfig::parse_triplet(row, base_seed + index, max_turns);
}

// Every run writes its effective settings so results are reproducible.
ordered_json run_metadata(const std::string& command, const json& cfg) {
  return ordered_json{{"meta",
                       ordered_json{{"command", command},
                                    {"config", ordered_json::parse(cfg.dump())}}}};
}

brace::Checkpoint fresh_checkpoint(const brace::TrainConfig& tc) {
  brace::Checkpoint ckpt;
  ckpt.action_policy = brace::PolicyParams::zeros(brace::kActionFeatureDim);
  ckpt.label_policy = brace::PolicyParams::zeros(brace::kLabelFeatureDim);
  ckpt.value_head = brace::PolicyParams::zeros(brace::kValueFeatureDim);
  ckpt.config = tc;
  return ckpt;
}

brace::Checkpoint load_checkpoint(const std::string& path, const brace::TrainConfig& tc) {
  if (path.empty()) return fresh_checkpoint(tc);
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--checkpoint", "cannot read " + path);
  brace::Checkpoint ckpt;
  from_json(json::parse(in), ckpt);
  if (ckpt.action_policy.feature_dim != brace::kActionFeatureDim ||
      ckpt.label_policy.feature_dim != brace::kLabelFeatureDim)
    throw CLI::ValidationError("--checkpoint", "feature dimensions do not match");
  return ckpt;
}

void save_checkpoint(const std::string& path, const brace::Checkpoint& ckpt) {
  ordered_json j;
  to_json(j, ckpt);
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

std::vector<brace::WorldState> load_worlds(const std::string& path) {
  std::vector<brace::WorldState> worlds;
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.path().extension() == ".json" &&
          entry.path().filename() != "manifest.json")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }
  for (const fs::path& f : files) {
    std::ifstream in(f);
    if (!in) throw CLI::ValidationError("--worlds", "cannot read " + f.string());
    brace::WorldState w;
    from_json(json::parse(in), w);
    worlds.push_back(std::move(w));
  }
  if (worlds.empty()) throw CLI::ValidationError("--worlds", "no world files in " + path);
  return worlds;
}

brace::EpisodeConfig episode_config(const json& cfg) {
  brace::EpisodeConfig ec;
  std::string mode = cfg.value("belief_mode", "oracle");
  ec.belief_mode = mode == "label_policy" ? brace::BeliefMode::LabelPolicy
                   : mode == "summary"    ? brace::BeliefMode::Summary
                                          : brace::BeliefMode::Oracle;
  ec.greedy_actions = cfg.value("greedy_actions", false);
  ec.greedy_labels = cfg.value("greedy_labels", false);
  ec.action_temperature = cfg.value("action_temperature", 1.0);
  ec.label_temperature = cfg.value("label_temperature", 1.0);
  ec.gamma_belief = train_config(cfg).gamma_belief;
  return ec;
}

int jobs_from(const json& cfg) {
  int jobs = cfg.value("jobs", 0);
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, jobs);
}

brace::WorldSource world_source(const json& cfg, uint64_t base_seed, int max_turns) {
  uint64_t pool = std::max<uint64_t>(1, cfg.value("world_pool", 1000));
  return [cfg, base_seed, max_turns, pool](uint64_t index) {
    return brace::generate_world(
        env_for_index(cfg, base_seed, index % pool, max_turns));
  };
}

int cmd_gen_worlds(const json& cfg, int count, const std::string& out_dir) {
  fs::create_directories(out_dir);
  uint64_t base = split_base_seed(cfg.value("split", "train"));
  int max_turns = cfg.value("max_turns", 15);
  ordered_json manifest = run_metadata("gen-worlds", cfg);
  ordered_json files = ordered_json::array();
  for (int i = 0; i < count; ++i) {
    brace::WorldState w =
        brace::generate_world(env_for_index(cfg, base, static_cast<uint64_t>(i), max_turns));
    ordered_json j;
    to_json(j, w);
    char name[32];
    std::snprintf(name, sizeof name, "world_%05d.json", i);
    std::ofstream out(fs::path(out_dir) / name);
    out << j.dump(2) << '\n';
    files.push_back(name);
  }
  manifest["files"] = std::move(files);
  std::ofstream mout(fs::path(out_dir) / "manifest.json");
  mout << manifest.dump(2) << '\n';
  std::cout << "wrote " << count << " worlds to " << out_dir << "\n";
  return 0;
}

int cmd_rollout(const json& cfg, const std::string& worlds_path,
                const std::string& out_path, const std::string& ckpt_path,
                uint64_t seed, int max_turns_override) {
  brace::TrainConfig tc = train_config(cfg);
  brace::Checkpoint ckpt = load_checkpoint(ckpt_path, tc);
  std::vector<brace::WorldState> worlds = load_worlds(worlds_path);
  if (max_turns_override > 0)
    for (brace::WorldState& w : worlds) w.max_turns = max_turns_override;

  auto trajectories =
      brace::rollout_worlds(worlds, ckpt, episode_config(cfg), seed, jobs_from(cfg));

  std::ofstream out(out_path);
  if (!out) throw CLI::ValidationError("--out", "cannot write " + out_path);
  out << run_metadata("rollout", cfg).dump() << '\n';
  for (size_t i = 0; i < trajectories.size(); ++i)
    brace::write_trajectory(out, static_cast<int>(i), trajectories[i]);
  brace::EvalResult r = brace::evaluate(trajectories);
  std::cout << "episodes " << r.episodes << " success_rate " << r.success_rate
            << " mean_steps " << r.mean_steps << "\n";
  return 0;
}

int cmd_eval(const json& cfg, const std::string& worlds_path,
             const std::string& ckpt_path, uint64_t seed, int max_turns_override) {
  brace::TrainConfig tc = train_config(cfg);
  brace::Checkpoint ckpt = load_checkpoint(ckpt_path, tc);
  std::vector<brace::WorldState> worlds = load_worlds(worlds_path);
  if (max_turns_override > 0)
    for (brace::WorldState& w : worlds) w.max_turns = max_turns_override;
  brace::EpisodeConfig ec = episode_config(cfg);
  ec.score_rewards = false;
  auto trajectories = brace::rollout_worlds(worlds, ckpt, ec, seed, jobs_from(cfg));
  brace::EvalResult r = brace::evaluate(trajectories);
  std::cout << "Acc " << r.success_rate << "\nSteps " << r.mean_steps << "\nEpisodes "
            << r.episodes << "\n";
  return 0;
}

int cmd_train(const std::string& which, const json& cfg, const std::string& out_path,
              const std::string& init_path, int updates, int group_size) {
  brace::TrainConfig tc = train_config(cfg);
  if (group_size > 0) tc.group_size = group_size;
  brace::Checkpoint ckpt = load_checkpoint(init_path, tc);
  ckpt.config = tc;
  int max_turns = cfg.value("max_turns", 15);
  brace::WorldSource source = world_source(cfg, kTrainBaseSeed, max_turns);
  int jobs = jobs_from(cfg);
  int batch = cfg.value("batch_size", 16);
  int wpu = cfg.value("worlds_per_update", 4);

  auto progress = [&which](const brace::TrainProgress& p) {
    std::ostringstream line;
    line << which << " update " << p.update << " loss " << p.loss << " kl " << p.kl
         << " batch_success " << p.batch_success << " batch_reward " << p.batch_reward;
    log_info(line.str());
  };

  if (which == "train-policy")
    brace::train_policy(source, ckpt, tc, updates, batch, jobs, progress);
  else if (which == "train-belief")
    brace::train_belief(source, ckpt, tc, updates, wpu, jobs, progress);
  else
    brace::train_joint(source, ckpt, tc, updates, batch, wpu, jobs, progress);

  save_checkpoint(out_path, ckpt);
  std::cout << "wrote checkpoint " << out_path << " after " << ckpt.updates
            << " updates\n";
  return 0;
}

int cmd_analyze(const json& cfg, const std::string& in_path, const std::string& out_dir) {
  std::ifstream in(in_path);
  if (!in) throw CLI::ValidationError("--in", "cannot read " + in_path);
  std::vector<brace::Trajectory> trajectories = brace::read_trajectories(in);
  if (trajectories.empty())
    throw CLI::ValidationError("--in", "no trajectories in " + in_path);

  std::vector<brace::CalibrationRecord> records;
  for (const brace::Trajectory& t : trajectories) {
    auto r = brace::collect_calibration_records(t);
    records.insert(records.end(), r.begin(), r.end());
  }

  fs::create_directories(out_dir);
  auto write = [&out_dir](const std::string& name, const std::string& body) {
    std::ofstream out(fs::path(out_dir) / name);
    out << body;
  };
  write("brier_by_step.csv", brace::brier_by_step_csv(brace::brier_by_step(records)));
  write("label_dist_by_step.csv",
        brace::label_dist_by_step_csv(brace::label_distribution_by_step(trajectories)));
  write("calibration_by_label.csv",
        brace::calibration_by_label_csv(brace::calibration_by_label(records)));
  write("context_growth.csv",
        brace::context_growth_csv(brace::context_growth(trajectories)));
  std::ofstream mout(fs::path(out_dir) / "run_meta.json");
  mout << run_metadata("analyze", cfg).dump(2) << '\n';
  std::cout << "wrote 4 csv files to " << out_dir << "\n";
  return 0;
}

int cmd_play(const json& cfg, const std::string& worlds_path, uint64_t seed) {
  brace::WorldState world;
  if (!worlds_path.empty()) {
    world = load_worlds(worlds_path).front();
  } else {
    world = brace::generate_world(
        env_for_index(cfg, split_base_seed(cfg.value("split", "train")), seed,
                      cfg.value("max_turns", 15)));
  }
  brace::GoalSpec goal = brace::parse_goal(world.goal_text);
  brace::BeliefState belief;
  brace::Observation obs = brace::initial_observation(world);
  brace::WorldState state = world;

  std::cout << "Goal: " << world.goal_text << "\n";
  while (true) {
    belief = brace::oracle_update(goal, belief, obs);
    std::cout << "\n" << obs.text << "\n\nBelief:\n"
              << brace::render_belief(belief) << "\n> " << std::flush;
    if (obs.terminal == brace::TerminalState::Success) {
      std::cout << "Success in " << state.turn << " turns.\n";
      return 0;
    }
    if (obs.terminal == brace::TerminalState::Failure) {
      std::cout << "Out of turns.\n";
      return 0;
    }
    std::string line;
    if (!std::getline(std::cin, line)) return 0;
    if (line == "quit" || line == "exit") return 0;
    if (line == "actions") {
      for (const auto& a : brace::admissible_actions(state))
        std::cout << "  " << a.rendered << "\n";
      continue;
    }
    auto action = brace::parse_action(line);
    if (!action) {
      std::cout << "Unknown command. Try 'actions', 'quit', or an action.\n";
      continue;
    }
    auto [next, next_obs] = brace::step(state, *action);
    state = std::move(next);
    obs = std::move(next_obs);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"belief-state agent sandbox"};
  app.require_subcommand(1);

  std::string config_path, worlds_path, out_path, in_path, ckpt_path, host = "127.0.0.1";
  std::vector<std::string> sets;
  uint64_t seed = 0;
  int count = 4, updates = 100, group_size = 0, max_turns = 0, port = 8787;

  app.add_option("--config", config_path, "JSON config file")->capture_default_str();
  app.add_option("--set", sets, "override config entries, key=value (repeatable)");

  auto* gen = app.add_subcommand("gen-worlds", "generate world files");
  gen->add_option("--count", count, "number of worlds");
  gen->add_option("--out", out_path, "output directory")->required();

  auto* rollout = app.add_subcommand("rollout", "run episodes, write trajectory JSONL");
  rollout->add_option("--worlds", worlds_path, "world file or directory")->required();
  rollout->add_option("--out", out_path, "trajectory JSONL path")->required();
  rollout->add_option("--checkpoint", ckpt_path, "checkpoint JSON");
  rollout->add_option("--seed", seed, "episode seed base");
  rollout->add_option("--max-turns", max_turns, "override max turns");

  auto* play = app.add_subcommand("play", "interactive episode");
  play->add_option("--worlds", worlds_path, "world file");
  play->add_option("--seed", seed, "world seed offset when generating");

  auto* tpol = app.add_subcommand("train-policy", "PPO over the action policy");
  auto* tbel = app.add_subcommand("train-belief", "GRPO over the label policy");
  auto* tjnt = app.add_subcommand("train-joint", "alternate policy and belief updates");
  for (auto* t : {tpol, tbel, tjnt}) {
    t->add_option("--out", out_path, "checkpoint output path")->required();
    t->add_option("--checkpoint", ckpt_path, "initial checkpoint");
    t->add_option("--updates", updates, "number of updates");
    t->add_option("--group-size", group_size, "GRPO group size");
  }

  auto* eval = app.add_subcommand("eval", "success rate and mean steps");
  eval->add_option("--worlds", worlds_path, "world file or directory")->required();
  eval->add_option("--checkpoint", ckpt_path, "checkpoint JSON");
  eval->add_option("--seed", seed, "episode seed base");
  eval->add_option("--max-turns", max_turns, "override max turns");

  auto* analyze = app.add_subcommand("analyze", "emit analytics CSVs from JSONL");
  analyze->add_option("--in", in_path, "trajectory JSONL")->required();
  analyze->add_option("--out", out_path, "output directory")->required();

  auto* server = app.add_subcommand("reward-server", "NDJSON reward service over TCP");
  server->add_option("--host", host, "bind address");
  server->add_option("--port", port, "TCP port");

  // lets --config / --set appear after the subcommand name
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    json cfg = load_config(config_path, sets);
    if (gen->parsed()) return cmd_gen_worlds(cfg, count, out_path);
    if (rollout->parsed())
      return cmd_rollout(cfg, worlds_path, out_path, ckpt_path, seed, max_turns);
    if (play->parsed()) return cmd_play(cfg, worlds_path, seed);
    if (tpol->parsed())
      return cmd_train("train-policy", cfg, out_path, ckpt_path, updates, group_size);
    if (tbel->parsed())
      return cmd_train("train-belief", cfg, out_path, ckpt_path, updates, group_size);
    if (tjnt->parsed())
      return cmd_train("train-joint", cfg, out_path, ckpt_path, updates, group_size);
    if (eval->parsed())
      return cmd_eval(cfg, worlds_path, ckpt_path, seed, max_turns);
    if (analyze->parsed()) return cmd_analyze(cfg, in_path, out_path);
    if (server->parsed()) {
      static std::atomic<bool> stop{false};
      if (!brace::run_reward_server(host, port, stop)) {
        std::cerr << "could not bind " << host << ":" << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

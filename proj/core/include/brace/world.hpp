// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "brace/wep.hpp"

namespace brace {

enum class Direction { North, South, East, West };
const std::string& direction_name(Direction d);
std::optional<Direction> direction_from_name(std::string_view name);
Direction opposite(Direction d);

// A passage may carry one named door; both directed edges of the passage
// mirror the same name and state.
enum class DoorState { None, Open, Closed, Locked };

struct Edge {
  int target = -1;
  DoorState door = DoorState::None;
  std::string door_name;  // empty iff door == None
  int key_id = -1;        // object id of the key, for locked doors
};

enum class ObjectKind { Key, Container, Item, Target };
const std::string& object_kind_name(ObjectKind k);

// Where an object currently is.
struct ObjectLocation {
  enum class Kind { Room, Container, Inventory } kind = Kind::Room;
  int id = -1;  // room id or container object id
};

struct ObjectInfo {
  int id = -1;
  std::string name;  // unique within a world
  ObjectKind kind = ObjectKind::Item;
  ObjectLocation location;
  bool openable = false;
  bool open = false;
};

struct QuestStep {
  std::string verb;
  std::vector<std::string> args;
  bool satisfied = false;
  std::string rendered;  // e.g. "take brass key"
};

struct ActionCommand {
  std::string verb;  // go/open/close/take/drop/put/unlock/look/inventory
  std::vector<std::string> args;
  std::string rendered;
};

ActionCommand make_action(std::string verb, std::vector<std::string> args = {});
std::optional<ActionCommand> parse_action(const std::string& text);

enum class WorldFamily { Quest, Treasure };

struct EnvConfig {
  WorldFamily family = WorldFamily::Quest;
  int rooms = 2, objects = 3, quest_length = 3;  // Quest triplet
  int level = 1;                                 // Treasure level 1..30
  uint64_t seed = 0;
  int max_turns = 15;

  static EnvConfig quest(int rooms, int objects, int quest_length,
                         uint64_t seed, int max_turns = 15);
  static EnvConfig treasure(int level, uint64_t seed, int max_turns = 15);
  static EnvConfig parse_triplet(const std::string& triplet, uint64_t seed,
                                 int max_turns = 15);
};

struct Room {
  int id = -1;
  std::string name;
};

// A ground atom revealed by an observation; matches the claim vocabulary.
struct Fact {
  Slot slot;
  std::string subject;
  std::string predicate;
};

enum class TerminalState { None, Success, Failure };

struct Observation {
  std::string text;
  std::vector<Fact> facts;
  TerminalState terminal = TerminalState::None;
};

struct WorldState {
  WorldFamily family = WorldFamily::Quest;
  std::vector<Room> rooms;
  std::map<std::pair<int, Direction>, Edge> edges;
  std::vector<ObjectInfo> objects;
  int agent_room = 0;
  std::vector<QuestStep> quest;
  uint64_t rng_seed = 0;
  int turn = 0;
  int max_turns = 15;
  std::string goal_text;
  std::vector<ActionCommand> witness;  // solvability proof from generation
  EnvConfig config;

  const Room& room(int id) const { return rooms.at(static_cast<size_t>(id)); }
  const ObjectInfo* object_by_name(std::string_view name) const;
  ObjectInfo* object_by_name(std::string_view name);
  const Edge* edge(int room_id, Direction d) const;
  Edge* edge(int room_id, Direction d);
  // Room holding the object, walking up through containers.
  int effective_room(const ObjectInfo& obj) const;
  bool object_visible(const ObjectInfo& obj) const;
  std::vector<const ObjectInfo*> inventory() const;
  int satisfied_steps() const;
  bool success() const;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deterministic in cfg.seed. Throws GenerationError if the config cannot be
// satisfied within the retry budget.
WorldState generate_world(const EnvConfig& cfg);

std::vector<ActionCommand> admissible_actions(const WorldState& s);

std::pair<WorldState, Observation> step(const WorldState& s, const ActionCommand& a);

// Initial observation before any action (full room view plus inventory).
Observation initial_observation(const WorldState& s);

std::string render_observation(const Observation& o);

// True/false if the fact can be checked against the world, nullopt otherwise.
std::optional<bool> evaluate_fact(const WorldState& s, const Fact& f);

void to_json(nlohmann::ordered_json& j, const WorldState& s);
void from_json(const nlohmann::json& j, WorldState& s);
void to_json(nlohmann::ordered_json& j, const EnvConfig& c);
void from_json(const nlohmann::json& j, EnvConfig& c);

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/world.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <sstream>

namespace brace {
namespace {

const std::array<std::string, 4> kDirectionNames = {"north", "south", "east", "west"};

const std::vector<std::string>& room_name_pool() {
  static const std::vector<std::string> kPool = {
      "kitchen",   "pantry",    "corridor",  "bedroom",   "garden",
      "attic",     "cellar",    "study",     "lounge",    "hall",
      "library",   "workshop",  "bathroom",  "balcony",   "closet",
      "laundry",   "office",    "parlor",    "foyer",     "greenhouse",
      "vault",     "gallery",   "nursery",   "scullery",  "stairwell",
      "basement",  "chapel",    "armory",    "kennel",    "larder",
      "solarium",  "boudoir",   "turret",    "vestibule", "sunroom",
      "den",       "atrium",    "porch",     "loft",      "alcove"};
  return kPool;
}

const std::vector<std::string>& adjective_pool() {
  static const std::vector<std::string> kPool = {
      "brass", "wooden", "copper", "rusty",  "silver", "glass",
      "red",   "blue",   "green",  "small",  "heavy",  "dusty",
      "iron",  "velvet", "ancient", "crooked"};
  return kPool;
}

const std::vector<std::string>& item_noun_pool() {
  static const std::vector<std::string> kPool = {
      "apple",  "book",   "lamp",   "coin",   "candle", "mug",
      "ribbon", "feather", "pebble", "bottle", "hammer", "spoon"};
  return kPool;
}

const std::vector<std::string>& container_noun_pool() {
  static const std::vector<std::string> kPool = {
      "box", "chest", "cabinet", "trunk", "crate", "basket", "locker", "drawer"};
  return kPool;
}

const std::vector<std::string>& door_adjective_pool() {
  static const std::vector<std::string> kPool = {
      "plain", "sliding", "oak", "barred", "painted", "screen",
      "arched", "narrow", "carved", "studded", "warped", "paneled"};
  return kPool;
}

const std::vector<std::string>& target_noun_pool() {
  static const std::vector<std::string> kPool = {
      "latchkey", "amulet", "chalice", "crown", "scepter", "locket", "idol", "orb"};
  return kPool;
}

std::pair<int, int> direction_delta(Direction d) {
  switch (d) {
    case Direction::North: return {0, 1};
    case Direction::South: return {0, -1};
    case Direction::East: return {1, 0};
    case Direction::West: return {-1, 0};
  }
  return {0, 0};
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

// Predicates are rebuilt from the live state by both observation construction
// and fact evaluation, so the two can never disagree.
std::string object_predicate(const WorldState& s, const ObjectInfo& obj) {
  std::string base;
  switch (obj.location.kind) {
    case ObjectLocation::Kind::Room:
      base = "in the " + s.room(obj.location.id).name;
      break;
    case ObjectLocation::Kind::Container: {
      const ObjectInfo& holder = s.objects.at(static_cast<size_t>(obj.location.id));
      base = "inside the " + holder.name;
      break;
    }
    case ObjectLocation::Kind::Inventory:
      base = "carried";
      break;
  }
  if (obj.openable) base += obj.open ? ", open" : ", closed";
  return base;
}

std::string door_predicate(DoorState st) {
  switch (st) {
    case DoorState::Open: return "open";
    case DoorState::Closed: return "closed";
    case DoorState::Locked: return "locked";
    case DoorState::None: break;
  }
  return "";
}

std::string exit_predicate(const Edge& e) {
  return e.door == DoorState::None ? "no door" : "through the " + e.door_name;
}

std::string inventory_predicate(const WorldState& s) {
  std::vector<std::string> names;
  for (const ObjectInfo* obj : s.inventory()) names.push_back(obj->name);
  std::sort(names.begin(), names.end());
  return names.empty() ? "empty" : "holding " + join_names(names);
}

std::string progress_predicate(const WorldState& s) {
  if (s.family == WorldFamily::Quest) {
    return std::to_string(s.satisfied_steps()) + " of " +
           std::to_string(s.quest.size()) + " quest steps completed";
  }
  return s.success() ? "target obtained" : "target not obtained";
}

struct DoorRef {
  int room;
  Direction dir;
};

// All door sides visible from the given room, keyed by door name.
std::map<std::string, DoorRef> doors_at(const WorldState& s, int room_id) {
  std::map<std::string, DoorRef> doors;
  for (int d = 0; d < 4; ++d) {
    auto dir = static_cast<Direction>(d);
    if (const Edge* e = s.edge(room_id, dir); e && e->door != DoorState::None)
      doors.emplace(e->door_name, DoorRef{room_id, dir});
  }
  return doors;
}

const Edge* find_door_by_name(const WorldState& s, std::string_view name,
                              DoorRef* ref = nullptr) {
  for (const auto& [key, edge] : s.edges) {
    if (edge.door != DoorState::None && edge.door_name == name) {
      if (ref) *ref = {key.first, key.second};
      return &edge;
    }
  }
  return nullptr;
}

std::vector<const ObjectInfo*> visible_objects(const WorldState& s) {
  std::vector<const ObjectInfo*> out;
  for (const ObjectInfo& obj : s.objects)
    if (s.object_visible(obj)) out.push_back(&obj);
  std::sort(out.begin(), out.end(),
            [](const ObjectInfo* a, const ObjectInfo* b) { return a->name < b->name; });
  return out;
}

void append_room_view_facts(const WorldState& s, std::vector<Fact>& facts) {
  const Room& here = s.room(s.agent_room);
  facts.push_back({Slot::Location, "player", "in the " + here.name});
  for (int d = 0; d < 4; ++d) {
    auto dir = static_cast<Direction>(d);
    const Edge* e = s.edge(s.agent_room, dir);
    if (!e) continue;
    facts.push_back({Slot::Exit, direction_name(dir) + " exit from " + here.name,
                     exit_predicate(*e)});
    if (e->door != DoorState::None)
      facts.push_back({Slot::ObjectState, e->door_name, door_predicate(e->door)});
  }
  for (const ObjectInfo* obj : visible_objects(s))
    facts.push_back({Slot::ObjectState, obj->name, object_predicate(s, *obj)});
}

// Carried objects are reported under ObjectState ("carried"), the same key as
// their room placement, so picking up or dropping replaces one claim instead
// of contradicting a second one.
void append_inventory_facts(const WorldState& s, std::vector<Fact>& facts) {
  facts.push_back({Slot::Inventory, "inventory", inventory_predicate(s)});
  std::vector<std::string> names;
  for (const ObjectInfo* obj : s.inventory()) names.push_back(obj->name);
  std::sort(names.begin(), names.end());
  for (const std::string& name : names)
    facts.push_back({Slot::ObjectState, name, "carried"});
}

// --- quest step conditions -------------------------------------------------

bool quest_step_holds(const WorldState& s, const QuestStep& step) {
  if (step.verb == "reach") {
    return s.room(s.agent_room).name == step.args.at(0);
  }
  if (step.verb == "take") {
    const ObjectInfo* obj = s.object_by_name(step.args.at(0));
    return obj && obj->location.kind == ObjectLocation::Kind::Inventory;
  }
  if (step.verb == "put") {
    const ObjectInfo* obj = s.object_by_name(step.args.at(0));
    const ObjectInfo* holder = s.object_by_name(step.args.at(1));
    return obj && holder && obj->location.kind == ObjectLocation::Kind::Container &&
           obj->location.id == holder->id;
  }
  if (step.verb == "open") {
    if (const ObjectInfo* obj = s.object_by_name(step.args.at(0))) return obj->open;
    if (const Edge* e = find_door_by_name(s, step.args.at(0)))
      return e->door == DoorState::Open;
    return false;
  }
  if (step.verb == "unlock") {
    const Edge* e = find_door_by_name(s, step.args.at(0));
    return e && e->door != DoorState::Locked;
  }
  return false;
}

std::string render_quest_step(const QuestStep& step) {
  if (step.verb == "reach") return "reach the " + step.args.at(0);
  if (step.verb == "take") return "take the " + step.args.at(0);
  if (step.verb == "open") return "open the " + step.args.at(0);
  if (step.verb == "unlock") return "unlock the " + step.args.at(0);
  if (step.verb == "put")
    return "put the " + step.args.at(0) + " in the " + step.args.at(1);
  return step.verb;
}

// Latches newly satisfied steps in order; returns true if progress advanced.
bool update_quest_progress(WorldState& s) {
  bool advanced = false;
  for (QuestStep& step : s.quest) {
    if (step.satisfied) continue;
    if (!quest_step_holds(s, step)) break;
    step.satisfied = true;
    advanced = true;
  }
  return advanced;
}

// --- generation ------------------------------------------------------------

using Rng = std::mt19937_64;

int rand_int(Rng& rng, int lo, int hi) {  // inclusive
  return static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1)) + lo;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<size_t>(rand_int(rng, 0, static_cast<int>(v.size()) - 1))];
}

template <typename T>
void shuffle_vec(Rng& rng, std::vector<T>& v) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

// Lays out `count` rooms on an integer grid via random adjacent growth.
// Returns grid positions; tree_edges records the growth edges.
struct Layout {
  std::vector<std::pair<int, int>> positions;
  std::vector<std::pair<int, int>> tree_edges;  // room index pairs
};

Layout layout_rooms(Rng& rng, int count) {
  Layout layout;
  std::map<std::pair<int, int>, int> at;
  layout.positions.push_back({0, 0});
  at[{0, 0}] = 0;
  int guard = 0;
  while (static_cast<int>(layout.positions.size()) < count) {
    if (++guard > count * 200) throw GenerationError("room layout did not converge");
    int base = rand_int(rng, 0, static_cast<int>(layout.positions.size()) - 1);
    auto dir = static_cast<Direction>(rand_int(rng, 0, 3));
    auto [dx, dy] = direction_delta(dir);
    std::pair<int, int> pos = {layout.positions[static_cast<size_t>(base)].first + dx,
                               layout.positions[static_cast<size_t>(base)].second + dy};
    if (at.count(pos)) continue;
    int id = static_cast<int>(layout.positions.size());
    layout.positions.push_back(pos);
    at[pos] = id;
    layout.tree_edges.push_back({base, id});
  }
  return layout;
}

void connect_rooms(Rng& rng, WorldState& world, const Layout& layout,
                   bool extra_edges) {
  std::map<std::pair<int, int>, int> at;
  for (size_t i = 0; i < layout.positions.size(); ++i)
    at[layout.positions[i]] = static_cast<int>(i);

  std::set<std::pair<int, int>> connected;
  for (auto [a, b] : layout.tree_edges) connected.insert({std::min(a, b), std::max(a, b)});

  if (extra_edges) {
    for (size_t i = 0; i < layout.positions.size(); ++i) {
      for (int d = 0; d < 4; ++d) {
        auto [dx, dy] = direction_delta(static_cast<Direction>(d));
        auto it = at.find({layout.positions[i].first + dx, layout.positions[i].second + dy});
        if (it == at.end()) continue;
        int a = static_cast<int>(i), b = it->second;
        if (a < b && !connected.count({a, b}) && rand_int(rng, 0, 99) < 30)
          connected.insert({a, b});
      }
    }
  }

  for (auto [a, b] : connected) {
    auto [ax, ay] = layout.positions[static_cast<size_t>(a)];
    auto [bx, by] = layout.positions[static_cast<size_t>(b)];
    Direction dir;
    if (bx > ax) dir = Direction::East;
    else if (bx < ax) dir = Direction::West;
    else if (by > ay) dir = Direction::North;
    else dir = Direction::South;
    world.edges[{a, dir}] = Edge{b, DoorState::None, "", -1};
    world.edges[{b, opposite(dir)}] = Edge{a, DoorState::None, "", -1};
  }
}

void set_door(WorldState& world, int room, Direction dir, DoorState st,
              const std::string& name, int key_id) {
  Edge& fwd = *world.edge(room, dir);
  Edge& rev = *world.edge(fwd.target, opposite(dir));
  fwd.door = rev.door = st;
  fwd.door_name = rev.door_name = name;
  fwd.key_id = rev.key_id = key_id;
}

std::vector<int> reachable_rooms(const WorldState& world, int start,
                                 const std::set<std::pair<int, Direction>>& blocked) {
  std::vector<bool> seen(world.rooms.size(), false);
  std::queue<int> queue;
  queue.push(start);
  seen[static_cast<size_t>(start)] = true;
  std::vector<int> out;
  while (!queue.empty()) {
    int r = queue.front();
    queue.pop();
    out.push_back(r);
    for (int d = 0; d < 4; ++d) {
      auto dir = static_cast<Direction>(d);
      const Edge* e = world.edge(r, dir);
      if (!e || blocked.count({r, dir})) continue;
      if (!seen[static_cast<size_t>(e->target)]) {
        seen[static_cast<size_t>(e->target)] = true;
        queue.push(e->target);
      }
    }
  }
  return out;
}

std::string fresh_name(Rng& rng, const std::vector<std::string>& adjectives,
                       const std::string& noun, std::set<std::string>& used) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::string name = pick(rng, adjectives) + " " + noun;
    if (used.insert(name).second) return name;
  }
  throw GenerationError("name pool exhausted");
}

bool is_meaningful(const ActionCommand& a) {
  return a.verb == "go" || a.verb == "open" || a.verb == "take" ||
         a.verb == "put" || a.verb == "unlock";
}

QuestStep condition_for_action(const WorldState& after, const ActionCommand& a) {
  QuestStep step;
  if (a.verb == "go") {
    step.verb = "reach";
    step.args = {after.room(after.agent_room).name};
  } else if (a.verb == "unlock") {
    step.verb = "unlock";
    step.args = {a.args.at(0)};
  } else {
    step.verb = a.verb;
    step.args = a.args;
  }
  step.rendered = render_quest_step(step);
  return step;
}

std::string quest_goal_text(const std::vector<QuestStep>& quest) {
  std::string text = "Your quest:";
  for (size_t i = 0; i < quest.size(); ++i)
    text += " " + std::to_string(i + 1) + ". " + quest[i].rendered + ".";
  return text;
}

WorldState generate_quest_world(const EnvConfig& cfg, Rng& rng) {
  WorldState world;
  world.family = WorldFamily::Quest;
  world.config = cfg;
  world.rng_seed = cfg.seed;
  world.max_turns = cfg.max_turns;

  Layout layout = layout_rooms(rng, cfg.rooms);
  std::vector<std::string> names = room_name_pool();
  shuffle_vec(rng, names);
  for (int i = 0; i < cfg.rooms; ++i)
    world.rooms.push_back({i, names[static_cast<size_t>(i)]});
  connect_rooms(rng, world, layout, /*extra_edges=*/true);

  std::set<std::string> used_names;

  // Doors on some passages.
  std::vector<std::pair<int, Direction>> passages;
  for (const auto& [key, edge] : world.edges)
    if (key.first < edge.target) passages.push_back(key);
  std::vector<std::pair<int, Direction>> closed_doors;
  for (const auto& [room, dir] : passages) {
    if (rand_int(rng, 0, 99) >= 40) continue;
    std::string name =
        fresh_name(rng, door_adjective_pool(), "door", used_names);
    DoorState st = rand_int(rng, 0, 1) ? DoorState::Open : DoorState::Closed;
    set_door(world, room, dir, st, name, -1);
    if (st == DoorState::Closed) closed_doors.push_back({room, dir});
  }

  // Objects: optionally one key (locking a closed door) and one container.
  int remaining = cfg.objects;
  int next_id = 0;
  auto add_object = [&](ObjectKind kind, const std::string& name, int room) {
    ObjectInfo obj;
    obj.id = next_id++;
    obj.name = name;
    obj.kind = kind;
    obj.location = {ObjectLocation::Kind::Room, room};
    obj.openable = kind == ObjectKind::Container;
    obj.open = false;
    world.objects.push_back(obj);
    return obj.id;
  };

  if (!closed_doors.empty() && remaining >= 2 && rand_int(rng, 0, 1) == 1) {
    auto [room, dir] = pick(rng, closed_doors);
    std::set<std::pair<int, Direction>> blocked = {
        {room, dir}, {world.edge(room, dir)->target, opposite(dir)}};
    std::vector<int> safe = reachable_rooms(world, 0, blocked);
    std::string key_name = fresh_name(rng, adjective_pool(), "key", used_names);
    int key_id = add_object(ObjectKind::Key, key_name, pick(rng, safe));
    set_door(world, room, dir, DoorState::Locked, world.edge(room, dir)->door_name,
             key_id);
    --remaining;
  }

  std::vector<int> container_ids;
  if (remaining >= 2) {
    std::string name = fresh_name(rng, adjective_pool(),
                                  pick(rng, container_noun_pool()), used_names);
    int id = add_object(ObjectKind::Container, name, rand_int(rng, 0, cfg.rooms - 1));
    world.objects.back().open = rand_int(rng, 0, 1) == 1;
    container_ids.push_back(id);
    --remaining;
  }

  while (remaining > 0) {
    std::string name = fresh_name(rng, adjective_pool(),
                                  pick(rng, item_noun_pool()), used_names);
    int id = add_object(ObjectKind::Item, name, rand_int(rng, 0, cfg.rooms - 1));
    if (!container_ids.empty() && rand_int(rng, 0, 99) < 25)
      world.objects[static_cast<size_t>(id)].location = {
          ObjectLocation::Kind::Container, pick(rng, container_ids)};
    --remaining;
  }

  world.agent_room = 0;

  // Quest: a guided rollout; the actions performed become the witness and
  // their postconditions become the quest steps.
  WorldState sim = world;
  std::vector<QuestStep> quest;
  std::vector<ActionCommand> witness;
  ActionCommand last;
  for (int i = 0; i < cfg.quest_length; ++i) {
    std::vector<ActionCommand> candidates;
    for (const ActionCommand& a : admissible_actions(sim)) {
      if (!is_meaningful(a)) continue;
      // Avoid immediately undoing a movement when something else is possible.
      if (a.verb == "go" && last.verb == "go" && !last.args.empty() &&
          a.args.at(0) == direction_name(opposite(*direction_from_name(last.args[0]))))
        continue;
      candidates.push_back(a);
    }
    if (candidates.empty()) {
      for (const ActionCommand& a : admissible_actions(sim))
        if (is_meaningful(a)) candidates.push_back(a);
    }
    if (candidates.empty()) throw GenerationError("quest rollout stalled");
    // Weight toward high-specificity steps; incidental completion by a random
    // agent should stay rare.
    auto weight_of = [](const ActionCommand& a) {
      if (a.verb == "put" || a.verb == "unlock") return 8;
      if (a.verb == "take") return 4;
      if (a.verb == "open") return 2;
      return 1;
    };
    int total_weight = 0;
    for (const ActionCommand& a : candidates) total_weight += weight_of(a);
    int roll = rand_int(rng, 0, total_weight - 1);
    size_t pick_idx = 0;
    for (size_t i = 0; i < candidates.size(); ++i) {
      roll -= weight_of(candidates[i]);
      if (roll < 0) { pick_idx = i; break; }
    }
    ActionCommand chosen = candidates[pick_idx];
    auto [next, obs] = step(sim, chosen);
    sim = next;
    quest.push_back(condition_for_action(sim, chosen));
    witness.push_back(chosen);
    last = chosen;
  }

  // Quests that never bind an object to a place are too easy to complete by
  // accident; insist on one put/unlock step when there is room for it.
  if (cfg.quest_length >= 3 && cfg.objects >= 2) {
    const QuestStep& last = quest.back();
    if (last.verb != "put" && last.verb != "unlock" && last.verb != "take")
      throw GenerationError("quest lacks a binding final step");
    bool specific = std::any_of(quest.begin(), quest.end(), [](const QuestStep& q) {
      return q.verb == "put" || q.verb == "unlock";
    });
    if (!specific) throw GenerationError("quest lacks a binding step");
  }

  world.quest = quest;
  world.witness = witness;
  world.goal_text = quest_goal_text(quest);

  // A quest whose conditions already hold in the initial state is degenerate.
  WorldState probe = world;
  if (update_quest_progress(probe) &&
      probe.satisfied_steps() == static_cast<int>(probe.quest.size()))
    throw GenerationError("quest trivially satisfied");
  return world;
}

WorldState generate_treasure_world(const EnvConfig& cfg, Rng& rng) {
  WorldState world;
  world.family = WorldFamily::Treasure;
  world.config = cfg;
  world.rng_seed = cfg.seed;
  world.max_turns = cfg.max_turns;

  int rooms = 2 + cfg.level;
  int nesting = std::min(1 + cfg.level / 10, 3);
  int distractors = cfg.level;

  Layout layout = layout_rooms(rng, rooms);
  std::vector<std::string> names = room_name_pool();
  shuffle_vec(rng, names);
  for (int i = 0; i < rooms; ++i) {
    std::string name = names[static_cast<size_t>(i) % names.size()];
    if (i >= static_cast<int>(names.size()))
      name += " " + std::to_string(i / static_cast<int>(names.size()) + 1);
    world.rooms.push_back({i, name});
  }
  connect_rooms(rng, world, layout, /*extra_edges=*/false);  // maze: tree only

  std::set<std::string> used_names;
  std::vector<std::pair<int, Direction>> passages;
  for (const auto& [key, edge] : world.edges)
    if (key.first < edge.target) passages.push_back(key);
  for (const auto& [room, dir] : passages) {
    if (rand_int(rng, 0, 99) >= 25) continue;
    std::string name = fresh_name(rng, door_adjective_pool(), "door", used_names);
    DoorState st = rand_int(rng, 0, 1) ? DoorState::Open : DoorState::Closed;
    set_door(world, room, dir, st, name, -1);
  }

  int next_id = 0;
  int target_room = rand_int(rng, 1, rooms - 1);

  // Nesting chain of containers around the target, outermost first.
  int holder = -1;
  for (int depth = 0; depth < nesting; ++depth) {
    ObjectInfo box;
    box.id = next_id++;
    box.name = fresh_name(rng, adjective_pool(), pick(rng, container_noun_pool()),
                          used_names);
    box.kind = ObjectKind::Container;
    box.openable = true;
    box.open = false;
    box.location = holder < 0
                       ? ObjectLocation{ObjectLocation::Kind::Room, target_room}
                       : ObjectLocation{ObjectLocation::Kind::Container, holder};
    holder = box.id;
    world.objects.push_back(box);
  }

  ObjectInfo target;
  target.id = next_id++;
  target.name = "golden " + pick(rng, target_noun_pool());
  target.kind = ObjectKind::Target;
  target.location = holder < 0
                        ? ObjectLocation{ObjectLocation::Kind::Room, target_room}
                        : ObjectLocation{ObjectLocation::Kind::Container, holder};
  world.objects.push_back(target);

  for (int i = 0; i < distractors; ++i) {
    ObjectInfo obj;
    obj.id = next_id++;
    obj.name = fresh_name(rng, adjective_pool(), pick(rng, item_noun_pool()),
                          used_names);
    obj.kind = ObjectKind::Item;
    obj.location = {ObjectLocation::Kind::Room, rand_int(rng, 0, rooms - 1)};
    world.objects.push_back(obj);
  }

  world.agent_room = 0;
  world.goal_text = "Find the " + target.name + " and take it.";

  // Witness: BFS path to the target room, opening doors and containers.
  std::vector<int> parent(world.rooms.size(), -1);
  std::vector<Direction> via(world.rooms.size(), Direction::North);
  std::queue<int> queue;
  queue.push(0);
  std::vector<bool> seen(world.rooms.size(), false);
  seen[0] = true;
  while (!queue.empty()) {
    int r = queue.front();
    queue.pop();
    for (int d = 0; d < 4; ++d) {
      auto dir = static_cast<Direction>(d);
      const Edge* e = world.edge(r, dir);
      if (!e || seen[static_cast<size_t>(e->target)]) continue;
      seen[static_cast<size_t>(e->target)] = true;
      parent[static_cast<size_t>(e->target)] = r;
      via[static_cast<size_t>(e->target)] = dir;
      queue.push(e->target);
    }
  }
  std::vector<std::pair<int, Direction>> path;  // (from room, dir)
  for (int r = target_room; r != 0; r = parent[static_cast<size_t>(r)])
    path.push_back({parent[static_cast<size_t>(r)], via[static_cast<size_t>(r)]});
  std::reverse(path.begin(), path.end());

  std::vector<ActionCommand> witness;
  for (auto [from, dir] : path) {
    const Edge* e = world.edge(from, dir);
    if (e->door == DoorState::Closed)
      witness.push_back(make_action("open", {e->door_name}));
    witness.push_back(make_action("go", {direction_name(dir)}));
  }
  // Open containers outermost-in, then take the target.
  std::vector<std::string> chain;
  for (const ObjectInfo& obj : world.objects) {
    if (obj.kind != ObjectKind::Container) continue;
    chain.push_back(obj.name);  // containers were created outermost first
  }
  for (const std::string& name : chain)
    witness.push_back(make_action("open", {name}));
  witness.push_back(make_action("take", {target.name}));
  world.witness = witness;

  QuestStep step;
  step.verb = "take";
  step.args = {target.name};
  step.rendered = render_quest_step(step);
  world.quest = {step};
  return world;
}

}  // namespace

const std::string& direction_name(Direction d) {
  return kDirectionNames[static_cast<size_t>(d)];
}

std::optional<Direction> direction_from_name(std::string_view name) {
  for (size_t i = 0; i < kDirectionNames.size(); ++i)
    if (kDirectionNames[i] == name) return static_cast<Direction>(i);
  return std::nullopt;
}

Direction opposite(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::East: return Direction::West;
    case Direction::West: return Direction::East;
  }
  return Direction::North;
}

const std::string& object_kind_name(ObjectKind k) {
  static const std::array<std::string, 4> kNames = {"key", "container", "item", "target"};
  return kNames[static_cast<size_t>(k)];
}

ActionCommand make_action(std::string verb, std::vector<std::string> args) {
  ActionCommand a;
  a.verb = std::move(verb);
  a.args = std::move(args);
  if (a.verb == "put" && a.args.size() == 2) {
    a.rendered = "put " + a.args[0] + " in " + a.args[1];
  } else if (a.verb == "unlock" && a.args.size() == 2) {
    a.rendered = "unlock " + a.args[0] + " with " + a.args[1];
  } else {
    a.rendered = a.verb;
    for (const std::string& arg : a.args) a.rendered += " " + arg;
  }
  return a;
}

std::optional<ActionCommand> parse_action(const std::string& text) {
  std::istringstream stream(text);
  std::string verb;
  if (!(stream >> verb)) return std::nullopt;
  std::string rest;
  std::getline(stream, rest);
  if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);

  if (verb == "look" || verb == "inventory")
    return rest.empty() ? std::optional(make_action(verb)) : std::nullopt;
  if (verb == "go") {
    if (!direction_from_name(rest)) return std::nullopt;
    return make_action("go", {rest});
  }
  if (verb == "put") {
    size_t sep = rest.rfind(" in ");
    if (sep == std::string::npos) return std::nullopt;
    return make_action("put", {rest.substr(0, sep), rest.substr(sep + 4)});
  }
  if (verb == "unlock") {
    size_t sep = rest.rfind(" with ");
    if (sep == std::string::npos) return std::nullopt;
    return make_action("unlock", {rest.substr(0, sep), rest.substr(sep + 6)});
  }
  if (verb == "open" || verb == "close" || verb == "take" || verb == "drop") {
    if (rest.empty()) return std::nullopt;
    return make_action(verb, {rest});
  }
  return std::nullopt;
}

EnvConfig EnvConfig::quest(int rooms, int objects, int quest_length,
                           uint64_t seed, int max_turns) {
  EnvConfig cfg;
  cfg.family = WorldFamily::Quest;
  cfg.rooms = rooms;
  cfg.objects = objects;
  cfg.quest_length = quest_length;
  cfg.seed = seed;
  cfg.max_turns = max_turns;
  return cfg;
}

EnvConfig EnvConfig::treasure(int level, uint64_t seed, int max_turns) {
  EnvConfig cfg;
  cfg.family = WorldFamily::Treasure;
  cfg.level = level;
  cfg.seed = seed;
  cfg.max_turns = max_turns;
  return cfg;
}

EnvConfig EnvConfig::parse_triplet(const std::string& triplet, uint64_t seed,
                                   int max_turns) {
  int r = 0, o = 0, q = 0;
  char c1 = 0, c2 = 0;
  std::istringstream stream(triplet);
  if (!(stream >> r >> c1 >> o >> c2 >> q) || c1 != ':' || c2 != ':')
    throw std::invalid_argument("bad quest triplet: " + triplet);
  return quest(r, o, q, seed, max_turns);
}

const ObjectInfo* WorldState::object_by_name(std::string_view name) const {
  for (const ObjectInfo& obj : objects)
    if (obj.name == name) return &obj;
  return nullptr;
}

ObjectInfo* WorldState::object_by_name(std::string_view name) {
  for (ObjectInfo& obj : objects)
    if (obj.name == name) return &obj;
  return nullptr;
}

const Edge* WorldState::edge(int room_id, Direction d) const {
  auto it = edges.find({room_id, d});
  return it == edges.end() ? nullptr : &it->second;
}

Edge* WorldState::edge(int room_id, Direction d) {
  auto it = edges.find({room_id, d});
  return it == edges.end() ? nullptr : &it->second;
}

int WorldState::effective_room(const ObjectInfo& obj) const {
  const ObjectInfo* cur = &obj;
  while (cur->location.kind == ObjectLocation::Kind::Container)
    cur = &objects.at(static_cast<size_t>(cur->location.id));
  return cur->location.kind == ObjectLocation::Kind::Room ? cur->location.id : -1;
}

bool WorldState::object_visible(const ObjectInfo& obj) const {
  const ObjectInfo* cur = &obj;
  while (cur->location.kind == ObjectLocation::Kind::Container) {
    const ObjectInfo& holder = objects.at(static_cast<size_t>(cur->location.id));
    if (!holder.open) return false;
    cur = &holder;
  }
  return cur->location.kind == ObjectLocation::Kind::Room &&
         cur->location.id == agent_room;
}

std::vector<const ObjectInfo*> WorldState::inventory() const {
  std::vector<const ObjectInfo*> out;
  for (const ObjectInfo& obj : objects)
    if (obj.location.kind == ObjectLocation::Kind::Inventory) out.push_back(&obj);
  return out;
}

int WorldState::satisfied_steps() const {
  int n = 0;
  for (const QuestStep& s : quest)
    if (s.satisfied) ++n;
  return n;
}

bool WorldState::success() const {
  if (family == WorldFamily::Treasure) {
    for (const ObjectInfo& obj : objects)
      if (obj.kind == ObjectKind::Target)
        return obj.location.kind == ObjectLocation::Kind::Inventory;
    return false;
  }
  return !quest.empty() && satisfied_steps() == static_cast<int>(quest.size());
}

WorldState generate_world(const EnvConfig& cfg) {
  if (cfg.max_turns < 1) throw GenerationError("max_turns must be >= 1");
  if (cfg.family == WorldFamily::Quest &&
      (cfg.rooms < 1 || cfg.objects < 1 || cfg.quest_length < 1))
    throw GenerationError("quest triplet components must be >= 1");
  if (cfg.family == WorldFamily::Treasure && (cfg.level < 1 || cfg.level > 30))
    throw GenerationError("treasure level must be in 1..30");

  constexpr int kRetryBudget = 64;
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ull * static_cast<uint64_t>(attempt + 1)));
    try {
      WorldState world = cfg.family == WorldFamily::Quest
                             ? generate_quest_world(cfg, rng)
                             : generate_treasure_world(cfg, rng);
      if (static_cast<int>(world.witness.size()) > cfg.max_turns)
        throw GenerationError("witness exceeds max_turns");
      return world;
    } catch (const GenerationError&) {
      if (attempt + 1 == kRetryBudget) throw;
    }
  }
  throw GenerationError("unsatisfiable config");
}

std::vector<ActionCommand> admissible_actions(const WorldState& s) {
  std::vector<ActionCommand> actions;
  for (int d = 0; d < 4; ++d) {
    auto dir = static_cast<Direction>(d);
    const Edge* e = s.edge(s.agent_room, dir);
    if (e && (e->door == DoorState::None || e->door == DoorState::Open))
      actions.push_back(make_action("go", {direction_name(dir)}));
  }

  auto doors = doors_at(s, s.agent_room);
  for (const auto& [name, ref] : doors) {
    DoorState st = s.edge(ref.room, ref.dir)->door;
    if (st == DoorState::Closed) actions.push_back(make_action("open", {name}));
    if (st == DoorState::Open) actions.push_back(make_action("close", {name}));
  }

  std::vector<const ObjectInfo*> visible = visible_objects(s);
  for (const ObjectInfo* obj : visible) {
    if (obj->openable && !obj->open) actions.push_back(make_action("open", {obj->name}));
    if (obj->openable && obj->open) actions.push_back(make_action("close", {obj->name}));
    if (obj->kind != ObjectKind::Container)
      actions.push_back(make_action("take", {obj->name}));
  }

  std::vector<const ObjectInfo*> carried = s.inventory();
  std::sort(carried.begin(), carried.end(),
            [](const ObjectInfo* a, const ObjectInfo* b) { return a->name < b->name; });
  for (const ObjectInfo* obj : carried) {
    actions.push_back(make_action("drop", {obj->name}));
    for (const ObjectInfo* box : visible)
      if (box->kind == ObjectKind::Container && box->open)
        actions.push_back(make_action("put", {obj->name, box->name}));
  }

  for (const auto& [name, ref] : doors) {
    const Edge* e = s.edge(ref.room, ref.dir);
    if (e->door != DoorState::Locked) continue;
    for (const ObjectInfo* obj : carried)
      if (obj->id == e->key_id)
        actions.push_back(make_action("unlock", {name, obj->name}));
  }

  actions.push_back(make_action("look"));
  actions.push_back(make_action("inventory"));
  return actions;
}

Observation initial_observation(const WorldState& s) {
  Observation obs;
  append_room_view_facts(s, obs.facts);
  append_inventory_facts(s, obs.facts);
  obs.text = render_observation(obs);
  return obs;
}

std::pair<WorldState, Observation> step(const WorldState& s, const ActionCommand& a) {
  WorldState next = s;
  Observation obs;

  auto all = admissible_actions(s);
  bool admissible = std::any_of(all.begin(), all.end(), [&a](const ActionCommand& c) {
    return c.rendered == a.rendered;
  });

  if (admissible) {
    if (a.verb == "go") {
      Direction dir = *direction_from_name(a.args.at(0));
      next.agent_room = next.edge(next.agent_room, dir)->target;
      append_room_view_facts(next, obs.facts);
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "look") {
      append_room_view_facts(next, obs.facts);
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "inventory") {
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "open" || a.verb == "close") {
      bool opening = a.verb == "open";
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      if (ObjectInfo* obj = next.object_by_name(a.args.at(0))) {
        obj->open = opening;
        obs.facts.push_back({Slot::ObjectState, obj->name, object_predicate(next, *obj)});
        if (opening) {
          // Opening reveals direct contents.
          std::vector<const ObjectInfo*> inside;
          for (const ObjectInfo& o : next.objects)
            if (o.location.kind == ObjectLocation::Kind::Container &&
                o.location.id == obj->id)
              inside.push_back(&o);
          std::sort(inside.begin(), inside.end(),
                    [](const ObjectInfo* x, const ObjectInfo* y) { return x->name < y->name; });
          for (const ObjectInfo* o : inside)
            obs.facts.push_back({Slot::ObjectState, o->name, object_predicate(next, *o)});
        }
      } else {
        DoorRef ref{};
        find_door_by_name(next, a.args.at(0), &ref);
        set_door(next, ref.room, ref.dir,
                 opening ? DoorState::Open : DoorState::Closed, a.args.at(0),
                 next.edge(ref.room, ref.dir)->key_id);
        obs.facts.push_back({Slot::ObjectState, a.args.at(0),
                             door_predicate(opening ? DoorState::Open : DoorState::Closed)});
      }
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "take") {
      next.object_by_name(a.args.at(0))->location = {ObjectLocation::Kind::Inventory, -1};
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "drop") {
      ObjectInfo* obj = next.object_by_name(a.args.at(0));
      obj->location = {ObjectLocation::Kind::Room, next.agent_room};
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      obs.facts.push_back({Slot::ObjectState, obj->name, object_predicate(next, *obj)});
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "put") {
      ObjectInfo* obj = next.object_by_name(a.args.at(0));
      ObjectInfo* box = next.object_by_name(a.args.at(1));
      obj->location = {ObjectLocation::Kind::Container, box->id};
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      obs.facts.push_back({Slot::ObjectState, obj->name, object_predicate(next, *obj)});
      append_inventory_facts(next, obs.facts);
    } else if (a.verb == "unlock") {
      DoorRef ref{};
      find_door_by_name(next, a.args.at(0), &ref);
      set_door(next, ref.room, ref.dir, DoorState::Closed, a.args.at(0),
               next.edge(ref.room, ref.dir)->key_id);
      obs.facts.push_back({Slot::Location, "player",
                           "in the " + next.room(next.agent_room).name});
      obs.facts.push_back({Slot::ObjectState, a.args.at(0), door_predicate(DoorState::Closed)});
      append_inventory_facts(next, obs.facts);
    }

    bool advanced = update_quest_progress(next);
    if (advanced || next.success())
      obs.facts.push_back({Slot::Progress, "quest", progress_predicate(next)});
  }

  next.turn = s.turn + 1;
  if (next.success())
    obs.terminal = TerminalState::Success;
  else if (next.turn >= next.max_turns)
    obs.terminal = TerminalState::Failure;

  obs.text = render_observation(obs);
  return {next, obs};
}

std::string render_observation(const Observation& o) {
  if (o.facts.empty()) return "Nothing happens.";
  std::string text;
  auto add = [&text](const std::string& sentence) {
    if (!text.empty()) text += ' ';
    text += sentence;
  };
  for (const Fact& f : o.facts) {
    switch (f.slot) {
      case Slot::Location:
        add("You are now " + f.predicate + ".");
        break;
      case Slot::Exit: {
        std::string dir = f.subject.substr(0, f.subject.find(' '));
        if (f.predicate == "no door")
          add("There is an exit to the " + dir + ".");
        else
          add("The " + dir + " exit goes " + f.predicate + ".");
        break;
      }
      case Slot::ObjectState:
        if (f.predicate != "carried")  // carried items show in the inventory line
          add("The " + f.subject + " is " + f.predicate + ".");
        break;
      case Slot::Inventory:
        if (f.subject == "inventory")
          add(f.predicate == "empty"
                  ? "You are carrying nothing."
                  : "You are carrying: " + f.predicate.substr(8) + ".");
        break;
      case Slot::Progress:
        add("Quest progress: " + f.predicate + ".");
        break;
      case Slot::Other:
        add(f.predicate);
        break;
    }
  }
  return text;
}

std::optional<bool> evaluate_fact(const WorldState& s, const Fact& f) {
  const std::string pred = normalize_phrase(f.predicate);
  switch (f.slot) {
    case Slot::Location: {
      if (f.subject != "player") return std::nullopt;
      return pred == normalize_phrase("in the " + s.room(s.agent_room).name);
    }
    case Slot::Exit: {
      std::istringstream stream(f.subject);
      std::string dir_word, exit_word, from_word, room_name;
      stream >> dir_word >> exit_word >> from_word;
      std::getline(stream, room_name);
      if (!room_name.empty() && room_name.front() == ' ') room_name.erase(0, 1);
      auto dir = direction_from_name(dir_word);
      if (!dir || exit_word != "exit" || from_word != "from") return std::nullopt;
      int room_id = -1;
      for (const Room& r : s.rooms)
        if (r.name == room_name) room_id = r.id;
      if (room_id < 0) return std::nullopt;
      const Edge* e = s.edge(room_id, *dir);
      if (!e) return false;
      return pred == normalize_phrase(exit_predicate(*e));
    }
    case Slot::ObjectState: {
      if (pred.rfind("exists", 0) == 0) {
        // Existence placeholder: true iff the named thing is in this world.
        return s.object_by_name(f.subject) != nullptr ||
               find_door_by_name(s, f.subject) != nullptr;
      }
      if (const ObjectInfo* obj = s.object_by_name(f.subject))
        return pred == normalize_phrase(object_predicate(s, *obj));
      if (const Edge* e = find_door_by_name(s, f.subject))
        return pred == normalize_phrase(door_predicate(e->door));
      return std::nullopt;
    }
    case Slot::Inventory: {
      if (f.subject == "inventory")
        return pred == normalize_phrase(inventory_predicate(s));
      if (const ObjectInfo* obj = s.object_by_name(f.subject))
        return (obj->location.kind == ObjectLocation::Kind::Inventory) ==
               (pred == "carried");
      return std::nullopt;
    }
    case Slot::Progress: {
      if (f.subject != "quest") return std::nullopt;
      return pred == normalize_phrase(progress_predicate(s));
    }
    case Slot::Other:
      return std::nullopt;
  }
  return std::nullopt;
}

// --- JSON ------------------------------------------------------------------

namespace {

nlohmann::ordered_json location_to_json(const ObjectLocation& loc) {
  const char* kind = loc.kind == ObjectLocation::Kind::Room        ? "room"
                     : loc.kind == ObjectLocation::Kind::Container ? "container"
                                                                   : "inventory";
  return nlohmann::ordered_json{{"kind", kind}, {"id", loc.id}};
}

ObjectLocation location_from_json(const nlohmann::json& j) {
  ObjectLocation loc;
  std::string kind = j.at("kind").get<std::string>();
  loc.kind = kind == "room"        ? ObjectLocation::Kind::Room
             : kind == "container" ? ObjectLocation::Kind::Container
                                   : ObjectLocation::Kind::Inventory;
  loc.id = j.at("id").get<int>();
  return loc;
}

const char* door_state_name(DoorState st) {
  switch (st) {
    case DoorState::None: return "none";
    case DoorState::Open: return "open";
    case DoorState::Closed: return "closed";
    case DoorState::Locked: return "locked";
  }
  return "none";
}

DoorState door_state_from_name(const std::string& name) {
  if (name == "open") return DoorState::Open;
  if (name == "closed") return DoorState::Closed;
  if (name == "locked") return DoorState::Locked;
  return DoorState::None;
}

}  // namespace

void to_json(nlohmann::ordered_json& j, const EnvConfig& c) {
  j = nlohmann::ordered_json{
      {"family", c.family == WorldFamily::Quest ? "quest" : "treasure"},
      {"rooms", c.rooms},
      {"objects", c.objects},
      {"quest_length", c.quest_length},
      {"level", c.level},
      {"seed", c.seed},
      {"max_turns", c.max_turns}};
}

void from_json(const nlohmann::json& j, EnvConfig& c) {
  c.family = j.value("family", "quest") == "treasure" ? WorldFamily::Treasure
                                                      : WorldFamily::Quest;
  c.rooms = j.value("rooms", 2);
  c.objects = j.value("objects", 3);
  c.quest_length = j.value("quest_length", 3);
  c.level = j.value("level", 1);
  c.seed = j.value("seed", uint64_t{0});
  c.max_turns = j.value("max_turns", 15);
}

void to_json(nlohmann::ordered_json& j, const WorldState& s) {
  nlohmann::ordered_json rooms = nlohmann::ordered_json::array();
  for (const Room& r : s.rooms)
    rooms.push_back(nlohmann::ordered_json{{"id", r.id}, {"name", r.name}});

  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& [key, e] : s.edges)
    edges.push_back(nlohmann::ordered_json{{"room", key.first},
                                           {"direction", direction_name(key.second)},
                                           {"target", e.target},
                                           {"door", door_state_name(e.door)},
                                           {"door_name", e.door_name},
                                           {"key_id", e.key_id}});

  nlohmann::ordered_json objects = nlohmann::ordered_json::array();
  for (const ObjectInfo& o : s.objects)
    objects.push_back(nlohmann::ordered_json{{"id", o.id},
                                             {"name", o.name},
                                             {"kind", object_kind_name(o.kind)},
                                             {"location", location_to_json(o.location)},
                                             {"openable", o.openable},
                                             {"open", o.open}});

  nlohmann::ordered_json quest = nlohmann::ordered_json::array();
  for (const QuestStep& q : s.quest)
    quest.push_back(nlohmann::ordered_json{{"verb", q.verb},
                                           {"args", q.args},
                                           {"satisfied", q.satisfied},
                                           {"rendered", q.rendered}});

  nlohmann::ordered_json witness = nlohmann::ordered_json::array();
  for (const ActionCommand& a : s.witness) witness.push_back(a.rendered);

  nlohmann::ordered_json config;
  to_json(config, s.config);

  j = nlohmann::ordered_json{
      {"family", s.family == WorldFamily::Quest ? "quest" : "treasure"},
      {"rooms", std::move(rooms)},
      {"edges", std::move(edges)},
      {"objects", std::move(objects)},
      {"agent_room", s.agent_room},
      {"quest", std::move(quest)},
      {"rng_seed", s.rng_seed},
      {"turn", s.turn},
      {"max_turns", s.max_turns},
      {"goal_text", s.goal_text},
      {"witness", std::move(witness)},
      {"config", std::move(config)}};
}

void from_json(const nlohmann::json& j, WorldState& s) {
  s = WorldState{};
  s.family = j.value("family", "quest") == "treasure" ? WorldFamily::Treasure
                                                      : WorldFamily::Quest;
  for (const auto& rj : j.at("rooms"))
    s.rooms.push_back({rj.at("id").get<int>(), rj.at("name").get<std::string>()});
  for (const auto& ej : j.at("edges")) {
    auto dir = direction_from_name(ej.at("direction").get<std::string>());
    Edge e;
    e.target = ej.at("target").get<int>();
    e.door = door_state_from_name(ej.at("door").get<std::string>());
    e.door_name = ej.value("door_name", "");
    e.key_id = ej.value("key_id", -1);
    s.edges[{ej.at("room").get<int>(), *dir}] = e;
  }
  for (const auto& oj : j.at("objects")) {
    ObjectInfo o;
    o.id = oj.at("id").get<int>();
    o.name = oj.at("name").get<std::string>();
    std::string kind = oj.at("kind").get<std::string>();
    o.kind = kind == "key"         ? ObjectKind::Key
             : kind == "container" ? ObjectKind::Container
             : kind == "target"    ? ObjectKind::Target
                                   : ObjectKind::Item;
    o.location = location_from_json(oj.at("location"));
    o.openable = oj.value("openable", false);
    o.open = oj.value("open", false);
    s.objects.push_back(o);
  }
  s.agent_room = j.at("agent_room").get<int>();
  for (const auto& qj : j.at("quest")) {
    QuestStep q;
    q.verb = qj.at("verb").get<std::string>();
    q.args = qj.at("args").get<std::vector<std::string>>();
    q.satisfied = qj.value("satisfied", false);
    q.rendered = qj.value("rendered", "");
    s.quest.push_back(q);
  }
  s.rng_seed = j.value("rng_seed", uint64_t{0});
  s.turn = j.value("turn", 0);
  s.max_turns = j.value("max_turns", 15);
  s.goal_text = j.value("goal_text", "");
  for (const auto& wj : j.at("witness")) {
    auto a = parse_action(wj.get<std::string>());
    if (a) s.witness.push_back(*a);
  }
  if (j.contains("config")) from_json(j.at("config"), s.config);
}

}  // namespace brace

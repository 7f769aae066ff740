// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "brace/reward.hpp"
#include "brace/world.hpp"

using namespace brace;

TEST_CASE("state tracking reward worked examples") {
  CHECK(state_tracking_reward({3, 0, 0, 6}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(state_tracking_reward({2, 1, 1, 4}) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(state_tracking_reward({0, 0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(state_tracking_reward({0, 3, 0, 5}) == doctest::Approx(0.0).epsilon(1e-9));
  // no observations to absorb: first factor collapses to 0/max(1,0)=0
  CHECK(state_tracking_reward({0, 0, 0, 4}) == doctest::Approx(0.0).epsilon(1e-9));
  // stale claims scale the reward down
  CHECK(state_tracking_reward({4, 0, 2, 8}) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("state tracking reward is monotone in its counts") {
  double base = state_tracking_reward({2, 2, 1, 8});
  CHECK(state_tracking_reward({3, 1, 1, 8}) > base);  // absorb one more
  CHECK(state_tracking_reward({2, 2, 2, 8}) < base);  // one more stale
}

TEST_CASE("state correctness reward worked examples") {
  CHECK(state_correctness_reward({5, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(state_correctness_reward({2, 1, 1, 3}) == doctest::Approx(0.625).epsilon(1e-9));
  CHECK(state_correctness_reward({0, 0, 0, 7}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(state_correctness_reward({0, 0, 0, 0}) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(state_correctness_reward({0, 4, 0, 0}) == doctest::Approx(0.5).epsilon(1e-9));
}

namespace {
BeliefState belief_with_labels(const std::vector<WepLevel>& labels) {
  BeliefState b;
  int i = 0;
  for (WepLevel l : labels)
    b.claims.push_back(
        make_claim(Slot::Other, "subject " + std::to_string(i++), "something", l));
  return b;
}
}  // namespace

TEST_CASE("diversity reward is normalized label entropy") {
  std::vector<WepLevel> uniform;
  for (int r = 0; r < 7; ++r) uniform.push_back(wep_from_rank(r));
  CHECK(diversity_reward(belief_with_labels(uniform)) ==
        doctest::Approx(1.0).epsilon(1e-9));

  CHECK(diversity_reward(belief_with_labels(
            std::vector<WepLevel>(9, WepLevel::Confirmed))) ==
        doctest::Approx(0.0).epsilon(1e-9));

  std::vector<WepLevel> two(4, WepLevel::Confirmed);
  two.insert(two.end(), 4, WepLevel::Unknown);
  CHECK(diversity_reward(belief_with_labels(two)) ==
        doctest::Approx(std::log(2.0) / std::log(7.0)).epsilon(1e-9));

  CHECK(diversity_reward(BeliefState{}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("among 7-claim beliefs entropy is maximized only by uniform labels") {
  // enumerate all histograms over 7 levels summing to 7
  double best = -1.0;
  int best_count = 0;
  std::vector<int> hist(7, 0);
  auto recurse = [&](auto&& self, int level, int remaining) -> void {
    if (level == 6) {
      hist[6] = remaining;
      std::vector<WepLevel> labels;
      for (int r = 0; r < 7; ++r)
        labels.insert(labels.end(), hist[r], wep_from_rank(r));
      double d = diversity_reward(belief_with_labels(labels));
      CHECK(d <= 1.0 + 1e-12);
      if (d > best + 1e-12) {
        best = d;
        best_count = 1;
      } else if (d > best - 1e-12) {
        ++best_count;
      }
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      hist[level] = k;
      self(self, level + 1, remaining - k);
    }
  };
  recurse(recurse, 0, 7);
  CHECK(best == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(best_count == 1);  // only the all-ones histogram
}

TEST_CASE("success reward discounts by episode step") {
  CHECK(success_reward(0, true) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(success_reward(3, true) == doctest::Approx(0.857375).epsilon(1e-9));
  CHECK(success_reward(3, false) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(success_reward(2, true, 0.5) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("composite combines the terms behind the format gate") {
  auto r = composite_reward(1, 0.5, 0.625, 0.35621, 0.857375);
  CHECK(r.composite == doctest::Approx(0.58464625).epsilon(1e-7));
  CHECK(r.r_format == 1.0);

  auto gated = composite_reward(0, 1.0, 1.0, 1.0, 1.0);
  CHECK(gated.composite == doctest::Approx(0.0).epsilon(1e-12));
}

namespace {
BeliefState mandatory_belief() {
  BeliefState b;
  b.claims = {
      make_claim(Slot::Location, "player", "in the kitchen", WepLevel::Confirmed),
      make_claim(Slot::Exit, "north exit from kitchen", "no door", WepLevel::Confirmed),
      make_claim(Slot::ObjectState, "brass key", "on the floor", WepLevel::Probable),
      make_claim(Slot::Inventory, "inventory", "empty", WepLevel::Confirmed),
      make_claim(Slot::Progress, "quest", "0 of 3 quest steps completed",
                 WepLevel::Confirmed),
  };
  return b;
}
}  // namespace

TEST_CASE("format reward corpus") {
  struct Case {
    std::string text;
    bool valid;
  };
  const std::string head =
      "- [Location] player | in the kitchen | confirmed\n"
      "- [Exit] north exit from kitchen | no door | confirmed\n"
      "- [ObjectState] brass key | on the floor | probable\n"
      "- [Inventory] inventory | empty | confirmed\n"
      "- [Progress] quest | 0 of 3 quest steps completed | confirmed\n";
  std::vector<Case> cases = {
      {head, true},
      {head + "- [Other] draft | from the east | possible\n", true},
      {head + "- [ObjectState] oak door | locked | almost certain\n", true},
      {head + "- a strange noise, possibly wind\n", true},
      {head + "- [ObjectState] brass key | I will take it | probable\n", false},
      {head + "- [Other] plan | my next step is north | possible\n", false},
      {head + "- [Other] plan | i should look around | probable\n", false},
      {head + "- [Other] plan | i plan to unlock it | probable\n", false},
      {head + "- [Location] player | maybe in the attic | possible\n", false},  // R5
  };
  // R4: drop each mandatory line in turn
  for (int skip = 0; skip < 5; ++skip) {
    std::string text;
    std::istringstream stream(head);
    std::string line;
    int i = 0;
    while (std::getline(stream, line))
      if (i++ != skip) text += line + "\n";
    cases.push_back({text, false});
  }
  // R6: exactly at the cap is fine, one over is not
  std::string at_cap = head, over_cap = head;
  for (int i = 0; i < 59; ++i)
    at_cap += "- [Other] thing " + std::to_string(i) + " | somewhere | possible\n";
  for (int i = 0; i < 60; ++i)
    over_cap += "- [Other] thing " + std::to_string(i) + " | somewhere | possible\n";
  cases.push_back({at_cap, true});
  cases.push_back({over_cap, false});

  for (const Case& c : cases) {
    CAPTURE(c.text.substr(0, 120));
    BeliefState b = parse_belief(c.text);
    CHECK(format_reward(b) == (c.valid ? 1 : 0));
  }

  // marker failures are parse errors, so the gate sees them upstream
  CHECK_THROWS_AS(parse_belief(head + "- the key is maybe here\n"), BeliefParseError);
}

TEST_CASE("oracle tracking on a constructed transition") {
  auto w = generate_world(EnvConfig::quest(2, 3, 3, 41));
  Observation obs = initial_observation(w);
  REQUIRE(obs.facts.size() >= 3);

  // pick three facts to report; absorb two at high rank, drop one
  const Fact& f0 = obs.facts[0];
  const Fact& f1 = obs.facts[1];
  Observation partial;
  partial.facts = {obs.facts[0], obs.facts[1], obs.facts[2]};

  // stale claim subject must not collide with any reported fact's key
  const ObjectInfo* stale_obj = nullptr;
  for (const ObjectInfo& o : w.objects) {
    bool clash = false;
    for (const Fact& f : {obs.facts[0], obs.facts[1], obs.facts[2]})
      clash = clash || f.subject == o.name;
    if (!clash) stale_obj = &o;
  }
  REQUIRE(stale_obj != nullptr);

  BeliefState prev;
  // carried-over claim about a verifiably false object state: stale once kept
  prev.claims.push_back(make_claim(Slot::ObjectState, stale_obj->name,
                                   "in the nonexistent hall", WepLevel::Possible));
  BeliefState next;
  next.claims.push_back(prev.claims[0]);  // unchanged and false -> stale
  next.claims.push_back(make_claim(f0.slot, f0.subject, f0.predicate,
                                   WepLevel::Confirmed));  // absorbed
  next.claims.push_back(make_claim(f1.slot, f1.subject, f1.predicate,
                                   WepLevel::Probable));  // absorbed
  next.claims.push_back(make_claim(Slot::Other, "draft", "from the east",
                                   WepLevel::Possible));

  auto c = oracle_track(prev, partial, next, w);
  CHECK(c.n_new == 2);
  CHECK(c.n_missing == 1);
  CHECK(c.n_stale == 1);
  CHECK(c.n_total == 4);
  CHECK(state_tracking_reward(c) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("low-rank restatement of an observed fact does not count as absorbed") {
  auto w = generate_world(EnvConfig::quest(2, 3, 3, 41));
  Observation obs = initial_observation(w);
  Observation partial;
  partial.facts = {obs.facts[0]};
  BeliefState next;
  next.claims.push_back(make_claim(obs.facts[0].slot, obs.facts[0].subject,
                                   obs.facts[0].predicate, WepLevel::Possible));
  auto c = oracle_track(BeliefState{}, partial, next, w);
  CHECK(c.n_new == 0);
  CHECK(c.n_missing == 1);
}

TEST_CASE("oracle verification grades appropriateness, not just truth") {
  auto w = generate_world(EnvConfig::quest(4, 6, 6, 41));
  Observation obs = initial_observation(w);
  FactHistory history;
  history.record(obs);

  // a true fact that was directly observed
  const Fact* observed = nullptr;
  for (const Fact& f : obs.facts)
    if (f.slot == Slot::Location) observed = &f;
  REQUIRE(observed != nullptr);

  // a true fact that was never observed: an object sitting in another room
  const ObjectInfo* hidden = nullptr;
  for (const ObjectInfo& o : w.objects)
    if (o.location.kind == ObjectLocation::Kind::Room &&
        o.location.id != w.agent_room && o.kind == ObjectKind::Item)
      hidden = &o;
  REQUIRE(hidden != nullptr);
  std::string hidden_pred = "in the " + w.room(w.effective_room(*hidden)).name;
  REQUIRE(evaluate_fact(w, {Slot::ObjectState, hidden->name, hidden_pred}) ==
          std::optional<bool>(true));

  BeliefState b;
  // observed true at Confirmed -> correct
  b.claims.push_back(make_claim(observed->slot, observed->subject,
                                observed->predicate, WepLevel::Confirmed));
  // unobserved true at Probable -> correct
  b.claims.push_back(make_claim(Slot::ObjectState, hidden->name, hidden_pred,
                                WepLevel::Probable));
  // unobserved true at Confirmed -> overclaiming, partial
  b.claims.push_back(make_claim(Slot::ObjectState, std::string(hidden->name),
                                hidden_pred, WepLevel::Confirmed));
  // false at Probable -> incorrect
  b.claims.push_back(make_claim(Slot::Location, "player", "in the nonexistent hall",
                                WepLevel::Probable));
  // false at Doubtful -> appropriately skeptical, correct
  b.claims.push_back(make_claim(Slot::Location, "player", "in the nonexistent hall",
                                WepLevel::Doubtful));
  // true at Unlikely -> underclaiming, partial
  b.claims.push_back(make_claim(observed->slot, observed->subject,
                                observed->predicate, WepLevel::Unlikely));
  // unverifiable prose
  b.claims.push_back(make_claim(Slot::Other, "the vibe", "ominous",
                                WepLevel::Possible));

  auto c = oracle_verify(b, w, history);
  CHECK(c.n_correct == 3);
  CHECK(c.n_partial == 2);
  CHECK(c.n_incorrect == 1);
  CHECK(c.n_unverifiable == 1);
  CHECK(state_correctness_reward(c) ==
        doctest::Approx((3 + 0.5 * 2) / 6.0).epsilon(1e-9));
}

TEST_CASE("history contradiction demotes direct support") {
  FactHistory h;
  h.record(Fact{Slot::ObjectState, "oak door", "closed"});
  CHECK(h.directly_supported(Slot::ObjectState, "oak door", "closed"));
  h.record(Fact{Slot::ObjectState, "oak door", "open"});
  CHECK_FALSE(h.directly_supported(Slot::ObjectState, "oak door", "closed"));
  CHECK(h.directly_supported(Slot::ObjectState, "oak door", "open"));
  CHECK_FALSE(h.directly_supported(Slot::ObjectState, "brass key", "open"));
}

TEST_CASE("claim extraction distinguishes prose from canonical claims") {
  BeliefState b = parse_belief(
      "- [ObjectState] brass key | on the floor | probable\n"
      "- The attic is almost certain dusty.\n");
  auto claims = extract_claims(b);
  REQUIRE(claims.size() == 2);
  CHECK_FALSE(claims[0].prose);
  CHECK(claims[0].subject == "brass key");
  CHECK(claims[0].label == WepLevel::Probable);
  CHECK(claims[1].prose);
}

TEST_CASE("reward breakdown JSON carries the counts") {
  RewardBreakdown r = composite_reward(1, 0.5, 0.625, 0.5, 0.25);
  r.tracking = {2, 1, 1, 4};
  r.verification = {2, 1, 1, 1};
  nlohmann::ordered_json j = r;
  CHECK(j.at("counts").at("n_new") == 2);
  CHECK(j.at("counts").at("n_incorrect") == 1);
  RewardBreakdown back = j.get<RewardBreakdown>();
  CHECK(back.composite == doctest::Approx(r.composite));
  CHECK(back.tracking.n_stale == 1);
  CHECK(back.verification.n_partial == 1);
}

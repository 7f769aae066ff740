// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "brace/wep.hpp"
#include "brace/world.hpp"

namespace brace {

struct TrackingCounts {
  int n_new = 0;
  int n_missing = 0;
  int n_stale = 0;
  int n_total = 0;
};

struct VerificationCounts {
  int n_correct = 0;
  int n_partial = 0;
  int n_incorrect = 0;
  int n_unverifiable = 0;

  int n_ver() const { return n_correct + n_partial + n_incorrect; }
};

struct RewardBreakdown {
  double r_format = 0.0;
  double r_st = 0.0;
  double r_sc = 0.0;
  double r_div = 0.0;
  double r_success = 0.0;
  double composite = 0.0;
  TrackingCounts tracking;
  VerificationCounts verification;
};

// Per-fact history the verifier needs: the most recently observed predicate
// for each (slot, subject). A later observation with a different predicate
// counts as an intervening contradiction of the earlier one.
struct FactHistory {
  std::map<std::pair<Slot, std::string>, std::string> last_observed;  // normalized

  void record(const Fact& f);
  void record(const Observation& obs);
  // (slot, subject, predicate) was observed and not contradicted since.
  bool directly_supported(Slot slot, const std::string& subject,
                          const std::string& predicate) const;
};

TrackingCounts oracle_track(const BeliefState& prev, const Observation& obs,
                            const BeliefState& next, const WorldState& truth);

double state_tracking_reward(const TrackingCounts& c);

VerificationCounts oracle_verify(const BeliefState& b, const WorldState& truth,
                                 const FactHistory& history);

double state_correctness_reward(const VerificationCounts& c);

double diversity_reward(const BeliefState& b);

int format_reward(const BeliefState& b);

double success_reward(int t, bool success, double gamma_belief = 0.95);

RewardBreakdown composite_reward(int format, double r_st, double r_sc,
                                 double r_div, double r_success);

// Full per-step scoring against ground truth.
RewardBreakdown score_belief(const BeliefState& prev, const Observation& obs,
                             const BeliefState& next, const WorldState& truth,
                             const FactHistory& history, int t, bool success,
                             double gamma_belief = 0.95);

struct ExtractedClaim {
  std::string subject;
  std::string predicate;
  WepLevel label;
  bool prose = false;
};

std::vector<ExtractedClaim> extract_claims(const BeliefState& b);

void to_json(nlohmann::ordered_json& j, const RewardBreakdown& r);
void from_json(const nlohmann::json& j, RewardBreakdown& r);

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/reward.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace brace {
namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

void FactHistory::record(const Fact& f) {
  last_observed[{f.slot, f.subject}] = normalize_phrase(f.predicate);
}

void FactHistory::record(const Observation& obs) {
  for (const Fact& f : obs.facts) record(f);
}

bool FactHistory::directly_supported(Slot slot, const std::string& subject,
                                     const std::string& predicate) const {
  auto it = last_observed.find({slot, subject});
  return it != last_observed.end() && it->second == normalize_phrase(predicate);
}

TrackingCounts oracle_track(const BeliefState& prev, const Observation& obs,
                            const BeliefState& next, const WorldState& truth) {
  TrackingCounts c;
  c.n_total = static_cast<int>(next.claims.size());

  for (const Fact& f : obs.facts) {
    const Claim* claim = next.find(f.slot, f.subject);
    bool captured = claim && claim->canonical &&
                    normalize_phrase(claim->predicate) == normalize_phrase(f.predicate) &&
                    wep_rank(claim->label) >= wep_rank(WepLevel::Probable);
    captured ? ++c.n_new : ++c.n_missing;
  }

  for (const Claim& claim : next.claims) {
    if (!claim.canonical) continue;
    const Claim* before = prev.find(claim.slot, claim.subject);
    if (!before || !before->same_content(claim)) continue;  // not carried over
    auto verdict = evaluate_fact(truth, {claim.slot, claim.subject, claim.predicate});
    if (verdict.has_value() && !*verdict) ++c.n_stale;
  }
  return c;
}

double state_tracking_reward(const TrackingCounts& c) {
  if (c.n_total == 0) return 0.0;
  double coverage =
      static_cast<double>(c.n_new) / std::max(1, c.n_new + c.n_missing);
  double freshness = 1.0 - static_cast<double>(c.n_stale) / c.n_total;
  return clamp01(coverage * freshness);
}

VerificationCounts oracle_verify(const BeliefState& b, const WorldState& truth,
                                 const FactHistory& history) {
  VerificationCounts c;
  for (const Claim& claim : b.claims) {
    if (!claim.canonical) {
      ++c.n_unverifiable;
      continue;
    }
    auto verdict = evaluate_fact(truth, {claim.slot, claim.subject, claim.predicate});
    if (!verdict.has_value()) {
      ++c.n_unverifiable;
      continue;
    }
    int rank = wep_rank(claim.label);
    if (!*verdict) {
      // Low-certainty labels on a false fact correctly disbelieve it.
      rank >= wep_rank(WepLevel::Possible) ? ++c.n_incorrect : ++c.n_correct;
      continue;
    }
    bool observed = history.directly_supported(claim.slot, claim.subject, claim.predicate);
    if (rank <= wep_rank(WepLevel::Unlikely)) {
      ++c.n_partial;  // true fact held in active disbelief
    } else if (observed) {
      rank >= wep_rank(WepLevel::AlmostCertain) ? ++c.n_correct : ++c.n_partial;
    } else {
      rank <= wep_rank(WepLevel::Probable) ? ++c.n_correct : ++c.n_partial;
    }
  }
  return c;
}

double state_correctness_reward(const VerificationCounts& c) {
  if (c.n_ver() == 0) return 0.0;
  return (c.n_correct + 0.5 * c.n_partial) / c.n_ver();
}

double diversity_reward(const BeliefState& b) {
  if (b.claims.empty()) return 0.0;
  std::array<int, kNumWepLevels> histogram{};
  for (const Claim& claim : b.claims)
    ++histogram[static_cast<size_t>(wep_rank(claim.label))];
  double h = 0.0;
  for (int count : histogram) {
    if (count == 0) continue;
    double p = static_cast<double>(count) / static_cast<double>(b.claims.size());
    h -= p * std::log(p);
  }
  return clamp01(h / std::log(7.0));
}

int format_reward(const BeliefState& b) {
  return validate_format(b).valid ? 1 : 0;
}

double success_reward(int t, bool success, double gamma_belief) {
  return success ? std::pow(gamma_belief, t) : 0.0;
}

RewardBreakdown composite_reward(int format, double r_st, double r_sc,
                                 double r_div, double r_success) {
  RewardBreakdown r;
  r.r_format = format ? 1.0 : 0.0;
  r.r_st = r_st;
  r.r_sc = r_sc;
  r.r_div = r_div;
  r.r_success = r_success;
  r.composite = r.r_format * (r_st + r_sc + r_div + r_success) / 4.0;
  return r;
}

RewardBreakdown score_belief(const BeliefState& prev, const Observation& obs,
                             const BeliefState& next, const WorldState& truth,
                             const FactHistory& history, int t, bool success,
                             double gamma_belief) {
  int format = format_reward(next);
  TrackingCounts tc = oracle_track(prev, obs, next, truth);
  VerificationCounts vc = oracle_verify(next, truth, history);
  RewardBreakdown r = composite_reward(
      format, state_tracking_reward(tc), state_correctness_reward(vc),
      diversity_reward(next), success_reward(t, success, gamma_belief));
  r.tracking = tc;
  r.verification = vc;
  return r;
}

std::vector<ExtractedClaim> extract_claims(const BeliefState& b) {
  std::vector<ExtractedClaim> out;
  out.reserve(b.claims.size());
  for (const Claim& claim : b.claims) {
    ExtractedClaim e;
    e.label = claim.label;
    if (claim.canonical) {
      e.subject = claim.subject;
      e.predicate = claim.predicate;
    } else {
      e.subject = claim.subject;  // full bullet body for prose claims
      e.prose = true;
    }
    out.push_back(std::move(e));
  }
  return out;
}

void to_json(nlohmann::ordered_json& j, const RewardBreakdown& r) {
  j = nlohmann::ordered_json{
      {"r_format", r.r_format},
      {"r_st", r.r_st},
      {"r_sc", r.r_sc},
      {"r_div", r.r_div},
      {"r_success", r.r_success},
      {"composite", r.composite},
      {"counts",
       {{"n_new", r.tracking.n_new},
        {"n_missing", r.tracking.n_missing},
        {"n_stale", r.tracking.n_stale},
        {"n_total", r.tracking.n_total},
        {"n_correct", r.verification.n_correct},
        {"n_partial", r.verification.n_partial},
        {"n_incorrect", r.verification.n_incorrect},
        {"n_unverifiable", r.verification.n_unverifiable}}}};
}

void from_json(const nlohmann::json& j, RewardBreakdown& r) {
  r.r_format = j.value("r_format", 0.0);
  r.r_st = j.value("r_st", 0.0);
  r.r_sc = j.value("r_sc", 0.0);
  r.r_div = j.value("r_div", 0.0);
  r.r_success = j.value("r_success", 0.0);
  r.composite = j.value("composite", 0.0);
  if (j.contains("counts")) {
    const auto& c = j.at("counts");
    r.tracking = {c.value("n_new", 0), c.value("n_missing", 0),
                  c.value("n_stale", 0), c.value("n_total", 0)};
    r.verification = {c.value("n_correct", 0), c.value("n_partial", 0),
                      c.value("n_incorrect", 0), c.value("n_unverifiable", 0)};
  }
}

}  // namespace brace

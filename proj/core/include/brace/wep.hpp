// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace brace {

// Ordinal certainty vocabulary. The enum value is the rank: higher = more
// certain. Confirmed=6 down to Unknown=0.
enum class WepLevel : int {
  Unknown = 0,
  Doubtful = 1,
  Unlikely = 2,
  Possible = 3,
  Probable = 4,
  AlmostCertain = 5,
  Confirmed = 6,
};

inline constexpr int kNumWepLevels = 7;

int wep_rank(WepLevel level);
WepLevel wep_from_rank(int rank);

// Nominal probability anchor for each level; strictly increasing in rank.
double wep_nominal_probability(WepLevel level);

// Canonical marker phrase used when rendering a claim ("almost certain", ...).
const std::string& wep_marker(WepLevel level);

// Level name as used in JSON ("Confirmed", "AlmostCertain", ...).
const std::string& wep_name(WepLevel level);
std::optional<WepLevel> wep_from_name(std::string_view name);

enum class Slot {
  Location,
  Exit,
  ObjectState,
  Inventory,
  Progress,
  Other,
};

const std::string& slot_name(Slot slot);
std::optional<Slot> slot_from_name(std::string_view name);

// The five slots every belief must cover.
const std::vector<Slot>& mandatory_slots();

struct Claim {
  Slot slot = Slot::Other;
  std::string subject;
  std::string predicate;
  WepLevel label = WepLevel::Unknown;
  std::string rendered;   // the "- ..." bullet
  bool canonical = false; // parsed from "subject | predicate | marker"

  std::pair<Slot, std::string> key() const { return {slot, subject}; }

  bool same_content(const Claim& other) const {
    return slot == other.slot && subject == other.subject &&
           predicate == other.predicate && label == other.label;
  }
};

// Builds a canonical claim with its rendered bullet line.
Claim make_claim(Slot slot, std::string subject, std::string predicate,
                 WepLevel label);

struct BeliefState {
  std::vector<Claim> claims;
  int step_index = 0;

  const Claim* find(Slot slot, std::string_view subject) const;
  bool has_slot(Slot slot) const;
};

struct FormatViolation {
  std::string rule_id;   // "R1".."R6"
  int claim_index = -1;  // -1 for belief-level rules
  std::string message;
};

struct FormatReport {
  bool valid = false;
  std::vector<FormatViolation> violations;
};

enum class ParseErrorKind { EmptyBelief, NoMarker, MultiMarker };

class BeliefParseError : public std::runtime_error {
 public:
  BeliefParseError(ParseErrorKind kind, std::string line, std::string what)
      : std::runtime_error(std::move(what)), kind_(kind), line_(std::move(line)) {}
  ParseErrorKind kind() const { return kind_; }
  const std::string& line() const { return line_; }

 private:
  ParseErrorKind kind_;
  std::string line_;
};

struct MarkerMatch {
  WepLevel level;
  size_t pos;
  size_t len;
};

// Scans a line for certainty markers, longest keyword first, case-insensitive,
// non-overlapping. "almost certain" wins over "certain".
std::vector<MarkerMatch> match_markers(std::string_view line);

inline constexpr int kDefaultClaimCap = 64;

// Parses the text between belief delimiters into claims. Throws
// BeliefParseError on EmptyBelief / NoMarker / MultiMarker.
BeliefState parse_belief(const std::string& text);

FormatReport validate_format(const BeliefState& belief,
                             const std::vector<Slot>& goal_slots = mandatory_slots(),
                             int claim_cap = kDefaultClaimCap);

struct ClaimDelta {
  std::vector<Claim> added;      // only in next
  std::vector<Claim> removed;    // only in prev
  std::vector<Claim> relabeled;  // same key, different predicate or label (next's claim)
  std::vector<Claim> unchanged;  // identical content
};

ClaimDelta diff_beliefs(const BeliefState& prev, const BeliefState& next);

std::string render_belief(const BeliefState& belief);

// Lowercase, strip articles (a/an/the), collapse whitespace, trim.
std::string normalize_phrase(std::string_view text);

void to_json(nlohmann::ordered_json& j, const Claim& c);
void from_json(const nlohmann::json& j, Claim& c);
void to_json(nlohmann::ordered_json& j, const BeliefState& b);
void from_json(const nlohmann::json& j, BeliefState& b);
void to_json(nlohmann::ordered_json& j, const FormatReport& r);

}  // namespace brace

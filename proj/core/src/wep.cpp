// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/wep.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace brace {
namespace {

const std::array<std::string, kNumWepLevels> kMarkers = {
    "unknown", "doubtful", "unlikely", "possible",
    "probable", "almost certain", "confirmed"};

const std::array<std::string, kNumWepLevels> kNames = {
    "Unknown", "Doubtful", "Unlikely", "Possible",
    "Probable", "AlmostCertain", "Confirmed"};

const std::array<double, kNumWepLevels> kNominal = {
    0.0, 0.25, 0.375, 0.5, 0.75, 0.875, 1.0};

// Keyword -> level table used by the marker scanner. Scanned longest-first so
// "almost certain" consumes before "certain" can match.
struct MarkerKeyword {
  std::string keyword;
  WepLevel level;
};

const std::vector<MarkerKeyword>& marker_keywords() {
  static const std::vector<MarkerKeyword> kKeywords = [] {
    std::vector<MarkerKeyword> v = {
        {"almost certain", WepLevel::AlmostCertain},
        {"no evidence", WepLevel::Unknown},
        {"ruled out", WepLevel::Doubtful},
        {"confirmed", WepLevel::Confirmed},
        {"certain", WepLevel::Confirmed},
        {"probable", WepLevel::Probable},
        {"probably", WepLevel::Probable},
        {"possible", WepLevel::Possible},
        {"possibly", WepLevel::Possible},
        {"unlikely", WepLevel::Unlikely},
        {"doubtful", WepLevel::Doubtful},
        {"unknown", WepLevel::Unknown},
    };
    std::stable_sort(v.begin(), v.end(),
                     [](const MarkerKeyword& a, const MarkerKeyword& b) {
                       return a.keyword.size() > b.keyword.size();
                     });
    return v;
  }();
  return kKeywords;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::array<std::string, 6> kSlotNames = {
    "Location", "Exit", "ObjectState", "Inventory", "Progress", "Other"};

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

const std::array<std::string, 4> kForbiddenPhrases = {
    "i will", "i should", "my next step", "i plan to"};

}  // namespace

int wep_rank(WepLevel level) { return static_cast<int>(level); }

WepLevel wep_from_rank(int rank) {
  if (rank < 0 || rank >= kNumWepLevels)
    throw std::out_of_range("wep rank out of range");
  return static_cast<WepLevel>(rank);
}

double wep_nominal_probability(WepLevel level) {
  return kNominal[static_cast<size_t>(level)];
}

const std::string& wep_marker(WepLevel level) {
  return kMarkers[static_cast<size_t>(level)];
}

const std::string& wep_name(WepLevel level) {
  return kNames[static_cast<size_t>(level)];
}

std::optional<WepLevel> wep_from_name(std::string_view name) {
  for (int i = 0; i < kNumWepLevels; ++i)
    if (kNames[static_cast<size_t>(i)] == name) return wep_from_rank(i);
  return std::nullopt;
}

const std::string& slot_name(Slot slot) {
  return kSlotNames[static_cast<size_t>(slot)];
}

std::optional<Slot> slot_from_name(std::string_view name) {
  std::string lower = to_lower(name);
  for (size_t i = 0; i < kSlotNames.size(); ++i)
    if (to_lower(kSlotNames[i]) == lower) return static_cast<Slot>(i);
  return std::nullopt;
}

const std::vector<Slot>& mandatory_slots() {
  static const std::vector<Slot> kSlots = {Slot::Location, Slot::Exit,
                                           Slot::ObjectState, Slot::Inventory,
                                           Slot::Progress};
  return kSlots;
}

Claim make_claim(Slot slot, std::string subject, std::string predicate,
                 WepLevel label) {
  Claim c;
  c.slot = slot;
  c.subject = std::move(subject);
  c.predicate = std::move(predicate);
  c.label = label;
  c.canonical = true;
  c.rendered = "- [" + slot_name(slot) + "] " + c.subject + " | " +
               c.predicate + " | " + wep_marker(label);
  return c;
}

const Claim* BeliefState::find(Slot slot, std::string_view subject) const {
  for (const Claim& c : claims)
    if (c.slot == slot && c.subject == subject) return &c;
  return nullptr;
}

bool BeliefState::has_slot(Slot slot) const {
  return std::any_of(claims.begin(), claims.end(),
                     [slot](const Claim& c) { return c.slot == slot; });
}

std::vector<MarkerMatch> match_markers(std::string_view line) {
  std::string lower = to_lower(line);
  std::vector<MarkerMatch> matches;
  std::vector<bool> covered(lower.size(), false);
  for (const MarkerKeyword& kw : marker_keywords()) {
    size_t pos = 0;
    while ((pos = lower.find(kw.keyword, pos)) != std::string::npos) {
      bool overlap = false;
      for (size_t i = pos; i < pos + kw.keyword.size(); ++i)
        if (covered[i]) { overlap = true; break; }
      if (!overlap) {
        matches.push_back({kw.level, pos, kw.keyword.size()});
        for (size_t i = pos; i < pos + kw.keyword.size(); ++i) covered[i] = true;
      }
      pos += kw.keyword.size();
    }
  }
  std::sort(matches.begin(), matches.end(),
            [](const MarkerMatch& a, const MarkerMatch& b) { return a.pos < b.pos; });
  return matches;
}

BeliefState parse_belief(const std::string& text) {
  BeliefState belief;
  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind("- ", 0) != 0) continue;  // non-bullet lines are ignored

    auto matches = match_markers(line);
    std::set<WepLevel> levels;
    for (const auto& m : matches) levels.insert(m.level);
    if (levels.empty())
      throw BeliefParseError(ParseErrorKind::NoMarker, line,
                             "bullet has no certainty marker: " + line);
    if (levels.size() > 1)
      throw BeliefParseError(ParseErrorKind::MultiMarker, line,
                             "bullet matches multiple certainty markers: " + line);

    Claim claim;
    claim.rendered = line;
    claim.label = *levels.begin();

    std::string body = trim(line.substr(2));
    Slot slot = Slot::Other;
    bool tagged = false;
    if (!body.empty() && body.front() == '[') {
      size_t close = body.find(']');
      if (close != std::string::npos) {
        auto s = slot_from_name(trim(body.substr(1, close - 1)));
        if (s) {
          slot = *s;
          tagged = true;
          body = trim(body.substr(close + 1));
        }
      }
    }

    // Canonical grammar: subject | predicate | marker.
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= body.size(); ++i) {
      if (i == body.size() || body[i] == '|') {
        parts.push_back(trim(body.substr(start, i - start)));
        start = i + 1;
      }
    }
    if (parts.size() == 3 && !parts[0].empty()) {
      claim.slot = slot;
      claim.subject = parts[0];
      claim.predicate = parts[1];
      claim.canonical = true;
    } else {
      // Prose bullet: kept for interop, excluded from oracle judging.
      claim.slot = tagged ? slot : Slot::Other;
      claim.subject = body;
      claim.predicate.clear();
      claim.canonical = false;
    }
    belief.claims.push_back(std::move(claim));
  }
  if (belief.claims.empty())
    throw BeliefParseError(ParseErrorKind::EmptyBelief, "",
                           "belief block contains no bullets");
  return belief;
}

FormatReport validate_format(const BeliefState& belief,
                             const std::vector<Slot>& goal_slots,
                             int claim_cap) {
  FormatReport report;
  auto add = [&report](std::string rule, int index, std::string message) {
    report.violations.push_back({std::move(rule), index, std::move(message)});
  };

  for (size_t i = 0; i < belief.claims.size(); ++i) {
    const Claim& c = belief.claims[i];
    if (c.rendered.rfind("- ", 0) != 0)
      add("R1", static_cast<int>(i), "bullet does not start with '- '");
    if (match_markers(c.rendered).size() != 1)
      add("R2", static_cast<int>(i), "bullet must contain exactly one certainty marker");
    std::string lower;
    lower.resize(c.rendered.size());
    std::transform(c.rendered.begin(), c.rendered.end(), lower.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    for (const std::string& phrase : kForbiddenPhrases) {
      if (lower.find(phrase) != std::string::npos) {
        add("R3", static_cast<int>(i), "forward-looking phrase: \"" + phrase + "\"");
        break;
      }
    }
  }

  for (Slot slot : goal_slots) {
    if (!belief.has_slot(slot))
      add("R4", -1, "no claim covers mandatory slot " + slot_name(slot));
  }

  std::set<std::pair<Slot, std::string>> seen;
  for (size_t i = 0; i < belief.claims.size(); ++i) {
    const Claim& c = belief.claims[i];
    if (!seen.insert(c.key()).second)
      add("R5", static_cast<int>(i),
          "duplicate (slot, subject): (" + slot_name(c.slot) + ", " + c.subject + ")");
  }

  if (static_cast<int>(belief.claims.size()) > claim_cap)
    add("R6", -1,
        "claim count " + std::to_string(belief.claims.size()) +
            " exceeds cap " + std::to_string(claim_cap));

  report.valid = report.violations.empty();
  return report;
}

ClaimDelta diff_beliefs(const BeliefState& prev, const BeliefState& next) {
  ClaimDelta delta;
  std::map<std::pair<Slot, std::string>, const Claim*> prev_by_key;
  for (const Claim& c : prev.claims) prev_by_key.emplace(c.key(), &c);

  std::set<std::pair<Slot, std::string>> next_keys;
  for (const Claim& c : next.claims) {
    next_keys.insert(c.key());
    auto it = prev_by_key.find(c.key());
    if (it == prev_by_key.end()) {
      delta.added.push_back(c);
    } else if (c.same_content(*it->second)) {
      delta.unchanged.push_back(c);
    } else {
      delta.relabeled.push_back(c);
    }
  }
  for (const Claim& c : prev.claims)
    if (!next_keys.count(c.key())) delta.removed.push_back(c);
  return delta;
}

std::string render_belief(const BeliefState& belief) {
  std::string out;
  for (const Claim& c : belief.claims) {
    out += c.rendered;
    out += '\n';
  }
  return out;
}

std::string normalize_phrase(std::string_view text) {
  std::string lower = to_lower(text);
  std::istringstream stream(lower);
  std::string word, out;
  while (stream >> word) {
    if (word == "a" || word == "an" || word == "the") continue;
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

void to_json(nlohmann::ordered_json& j, const Claim& c) {
  j = nlohmann::ordered_json{{"slot", slot_name(c.slot)},
                             {"subject", c.subject},
                             {"predicate", c.predicate},
                             {"label", wep_name(c.label)},
                             {"rendered", c.rendered}};
}

void from_json(const nlohmann::json& j, Claim& c) {
  auto slot = slot_from_name(j.at("slot").get<std::string>());
  auto label = wep_from_name(j.at("label").get<std::string>());
  if (!slot || !label) throw std::invalid_argument("bad claim json");
  c.slot = *slot;
  c.subject = j.at("subject").get<std::string>();
  c.predicate = j.at("predicate").get<std::string>();
  c.label = *label;
  c.rendered = j.value("rendered", "");
  c.canonical = !c.predicate.empty() || c.rendered.find('|') != std::string::npos;
  if (c.rendered.empty())
    c = make_claim(c.slot, c.subject, c.predicate, c.label);
}

void to_json(nlohmann::ordered_json& j, const BeliefState& b) {
  nlohmann::ordered_json claims = nlohmann::ordered_json::array();
  for (const Claim& c : b.claims) {
    nlohmann::ordered_json cj;
    to_json(cj, c);
    claims.push_back(std::move(cj));
  }
  j = nlohmann::ordered_json{{"step_index", b.step_index}, {"claims", std::move(claims)}};
}

void from_json(const nlohmann::json& j, BeliefState& b) {
  b.step_index = j.value("step_index", 0);
  b.claims.clear();
  for (const auto& cj : j.at("claims")) {
    Claim c;
    from_json(cj, c);
    b.claims.push_back(std::move(c));
  }
}

void to_json(nlohmann::ordered_json& j, const FormatReport& r) {
  nlohmann::ordered_json v = nlohmann::ordered_json::array();
  for (const auto& viol : r.violations)
    v.push_back(nlohmann::ordered_json{{"rule_id", viol.rule_id},
                                       {"claim_index", viol.claim_index},
                                       {"message", viol.message}});
  j = nlohmann::ordered_json{{"valid", r.valid}, {"violations", std::move(v)}};
}

}  // namespace brace

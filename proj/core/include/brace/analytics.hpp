// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "brace/agents.hpp"
#include "brace/wep.hpp"

namespace brace {

struct CalibrationRecord {
  int step = 0;
  WepLevel label = WepLevel::Unknown;
  bool truth = false;
};

class EmptyRecordSet : public std::runtime_error {
 public:
  EmptyRecordSet() : std::runtime_error("no calibration records") {}
};

struct CalibrationRow {
  WepLevel label;
  int count = 0;
  double truth_rate = 0.0;  // meaningful only when count > 0
  double nominal = 0.0;
};

struct CalibrationTable {
  std::array<CalibrationRow, kNumWepLevels> rows;
  int total = 0;
};

// Mean squared gap between a label's nominal probability and the verdict.
double brier_score(const std::vector<CalibrationRecord>& records);

std::vector<CalibrationRecord> collect_calibration_records(const Trajectory& traj);

struct BrierByStep {
  std::vector<double> mean;  // indexed by step; NaN-free, only counted steps present
  std::vector<int> count;
};

BrierByStep brier_by_step(const std::vector<CalibrationRecord>& records);

struct LabelDistByStep {
  // fractions[step][rank]; counts[step] = claims observed at that step
  std::vector<std::array<double, kNumWepLevels>> fractions;
  std::vector<int> counts;
};

LabelDistByStep label_distribution_by_step(const std::vector<Trajectory>& trajectories);

CalibrationTable calibration_by_label(const std::vector<CalibrationRecord>& records,
                                      int step_min = 0, int step_max = 1 << 30);

struct ContextGrowth {
  std::vector<double> mean_raw_words;
  std::vector<double> mean_belief_words;
  std::vector<int> alive;  // episodes contributing at each step
};

ContextGrowth context_growth(const std::vector<Trajectory>& trajectories);

// Least-squares slope of y over x; NaN when fewer than two points.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);
double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y);

// CSV emitters; column orders are part of the tool's contract.
std::string brier_by_step_csv(const BrierByStep& b);
std::string label_dist_by_step_csv(const LabelDistByStep& d);
std::string calibration_by_label_csv(const CalibrationTable& t);
std::string context_growth_csv(const ContextGrowth& g);

}  // namespace brace

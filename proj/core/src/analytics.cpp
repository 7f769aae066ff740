// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/analytics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace brace {
namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

}  // namespace

double brier_score(const std::vector<CalibrationRecord>& records) {
  if (records.empty()) throw EmptyRecordSet();
  double sum = 0.0;
  for (const CalibrationRecord& r : records) {
    double gap = wep_nominal_probability(r.label) - (r.truth ? 1.0 : 0.0);
    sum += gap * gap;
  }
  return sum / static_cast<double>(records.size());
}

std::vector<CalibrationRecord> collect_calibration_records(const Trajectory& traj) {
  std::vector<CalibrationRecord> out;
  for (const StepRecord& rec : traj.records) {
    for (size_t i = 0; i < rec.claim_truth.size(); ++i) {
      if (rec.claim_truth[i] < 0) continue;  // unverifiable
      out.push_back({rec.step, rec.belief.claims[i].label, rec.claim_truth[i] == 1});
    }
  }
  return out;
}

BrierByStep brier_by_step(const std::vector<CalibrationRecord>& records) {
  BrierByStep out;
  for (const CalibrationRecord& r : records) {
    size_t s = static_cast<size_t>(r.step);
    if (out.mean.size() <= s) {
      out.mean.resize(s + 1, 0.0);
      out.count.resize(s + 1, 0);
    }
    double gap = wep_nominal_probability(r.label) - (r.truth ? 1.0 : 0.0);
    out.mean[s] += gap * gap;
    ++out.count[s];
  }
  for (size_t s = 0; s < out.mean.size(); ++s)
    if (out.count[s] > 0) out.mean[s] /= out.count[s];
  return out;
}

LabelDistByStep label_distribution_by_step(const std::vector<Trajectory>& trajectories) {
  LabelDistByStep out;
  for (const Trajectory& traj : trajectories) {
    for (const StepRecord& rec : traj.records) {
      size_t s = static_cast<size_t>(rec.step);
      if (out.fractions.size() <= s) {
        out.fractions.resize(s + 1, {});
        out.counts.resize(s + 1, 0);
      }
      for (const Claim& c : rec.belief.claims) {
        out.fractions[s][static_cast<size_t>(wep_rank(c.label))] += 1.0;
        ++out.counts[s];
      }
    }
  }
  for (size_t s = 0; s < out.fractions.size(); ++s)
    if (out.counts[s] > 0)
      for (double& f : out.fractions[s]) f /= out.counts[s];
  return out;
}

CalibrationTable calibration_by_label(const std::vector<CalibrationRecord>& records,
                                      int step_min, int step_max) {
  CalibrationTable table;
  for (int rank = 0; rank < kNumWepLevels; ++rank) {
    table.rows[static_cast<size_t>(rank)].label = wep_from_rank(rank);
    table.rows[static_cast<size_t>(rank)].nominal =
        wep_nominal_probability(wep_from_rank(rank));
  }
  for (const CalibrationRecord& r : records) {
    if (r.step < step_min || r.step > step_max) continue;
    CalibrationRow& row = table.rows[static_cast<size_t>(wep_rank(r.label))];
    row.truth_rate += r.truth ? 1.0 : 0.0;
    ++row.count;
    ++table.total;
  }
  for (CalibrationRow& row : table.rows)
    if (row.count > 0) row.truth_rate /= row.count;
  return table;
}

ContextGrowth context_growth(const std::vector<Trajectory>& trajectories) {
  ContextGrowth out;
  for (const Trajectory& traj : trajectories) {
    for (const StepRecord& rec : traj.records) {
      size_t s = static_cast<size_t>(rec.step);
      if (out.alive.size() <= s) {
        out.mean_raw_words.resize(s + 1, 0.0);
        out.mean_belief_words.resize(s + 1, 0.0);
        out.alive.resize(s + 1, 0);
      }
      out.mean_raw_words[s] += rec.context_words_raw;
      out.mean_belief_words[s] += rec.context_words_belief;
      ++out.alive[s];
    }
  }
  for (size_t s = 0; s < out.alive.size(); ++s) {
    if (out.alive[s] == 0) continue;
    out.mean_raw_words[s] /= out.alive[s];
    out.mean_belief_words[s] /= out.alive[s];
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    return std::numeric_limits<double>::quiet_NaN();
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 1.0;
  return (sxy * sxy) / (sxx * syy);
}

std::string brier_by_step_csv(const BrierByStep& b) {
  std::string out = "step,mean_brier,claims\n";
  for (size_t s = 0; s < b.mean.size(); ++s) {
    if (b.count[s] == 0) continue;
    out += std::to_string(s) + "," + fmt(b.mean[s]) + "," +
           std::to_string(b.count[s]) + "\n";
  }
  return out;
}

std::string label_dist_by_step_csv(const LabelDistByStep& d) {
  std::string out = "step,label,fraction,claims\n";
  for (size_t s = 0; s < d.fractions.size(); ++s) {
    if (d.counts[s] == 0) continue;
    for (int rank = 0; rank < kNumWepLevels; ++rank)
      out += std::to_string(s) + "," + wep_name(wep_from_rank(rank)) + "," +
             fmt(d.fractions[s][static_cast<size_t>(rank)]) + "," +
             std::to_string(d.counts[s]) + "\n";
  }
  return out;
}

std::string calibration_by_label_csv(const CalibrationTable& t) {
  std::string out = "label,count,empirical_truth_rate,nominal_probability\n";
  for (const CalibrationRow& row : t.rows) {
    out += wep_name(row.label) + "," + std::to_string(row.count) + ",";
    out += row.count > 0 ? fmt(row.truth_rate) : "absent";
    out += "," + fmt(row.nominal) + "\n";
  }
  return out;
}

std::string context_growth_csv(const ContextGrowth& g) {
  std::string out = "step,mean_raw_words,mean_belief_words,alive\n";
  for (size_t s = 0; s < g.alive.size(); ++s) {
    if (g.alive[s] == 0) continue;
    out += std::to_string(s) + "," + fmt(g.mean_raw_words[s]) + "," +
           fmt(g.mean_belief_words[s]) + "," + std::to_string(g.alive[s]) + "\n";
  }
  return out;
}

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "brace/agents.hpp"

namespace brace {

// One JSONL line per step. Lines whose object carries a "meta" key are run
// metadata and are skipped by readers.
nlohmann::ordered_json step_record_to_json(int episode_id, const std::string& goal,
                                           const StepRecord& rec);

void write_trajectory(std::ostream& out, int episode_id, const Trajectory& traj);

// Reads every step line; groups records back into trajectories by episode_id.
std::vector<Trajectory> read_trajectories(std::istream& in);

}  // namespace brace

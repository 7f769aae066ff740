// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <string>

namespace brace {

// Scores one newline-delimited JSON request line and returns the response
// line (without trailing newline). Never throws; malformed input yields an
// error object so the connection can stay open.
std::string handle_reward_request(const std::string& line);

// Blocking accept loop on host:port; one thread per connection, responses in
// request order per connection. `stop` ends the loop; returns false if the
// socket could not be opened.
bool run_reward_server(const std::string& host, int port,
                       const std::atomic<bool>& stop);

}  // namespace brace

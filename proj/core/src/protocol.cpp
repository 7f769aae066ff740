// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/protocol.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>
#include <vector>

#include "json.hpp"

#include "brace/log.hpp"
#include "brace/reward.hpp"
#include "brace/wep.hpp"
#include "brace/world.hpp"

namespace brace {
namespace {

nlohmann::ordered_json error_response(const std::string& message) {
  return nlohmann::ordered_json{{"error", message}};
}

nlohmann::ordered_json format_report_json(const FormatReport& report) {
  nlohmann::ordered_json j;
  to_json(j, report);
  return j;
}

nlohmann::ordered_json score(const nlohmann::json& req) {
  // World: either a full world object or {seed, config}.
  WorldState world;
  const auto& wj = req.at("world");
  if (wj.contains("rooms") && wj.at("rooms").is_array()) {
    from_json(wj, world);
  } else {
    EnvConfig cfg;
    from_json(wj.contains("config") ? wj.at("config") : wj, cfg);
    if (wj.contains("seed")) cfg.seed = wj.at("seed").get<uint64_t>();
    world = generate_world(cfg);
  }

  Observation obs;
  for (const auto& fj : req.value("observation_facts", nlohmann::json::array())) {
    Fact f;
    auto slot = slot_from_name(fj.value("slot", ""));
    f.slot = slot.value_or(Slot::Other);
    f.subject = fj.value("subject", "");
    f.predicate = fj.value("predicate", "");
    obs.facts.push_back(std::move(f));
  }

  FactHistory history;
  for (const auto& fj : req.value("history_facts", nlohmann::json::array())) {
    Fact f;
    auto slot = slot_from_name(fj.value("slot", ""));
    f.slot = slot.value_or(Slot::Other);
    f.subject = fj.value("subject", "");
    f.predicate = fj.value("predicate", "");
    history.record(f);
  }
  history.record(obs);

  BeliefState prev;
  if (req.contains("prev_belief_text") &&
      !req.at("prev_belief_text").get<std::string>().empty()) {
    try {
      prev = parse_belief(req.at("prev_belief_text").get<std::string>());
    } catch (const BeliefParseError&) {
      prev = BeliefState{};  // an unusable prior simply contributes nothing
    }
  }

  BeliefState next;
  try {
    next = parse_belief(req.at("next_belief_text").get<std::string>());
  } catch (const BeliefParseError& e) {
    // Unparseable belief: format gate 0, violations listed, all else zero.
    FormatReport report;
    report.valid = false;
    report.violations.push_back({"parse", -1, e.what()});
    RewardBreakdown zero;
    nlohmann::ordered_json rj;
    to_json(rj, zero);
    return nlohmann::ordered_json{{"reward_breakdown", std::move(rj)},
                                  {"format_report", format_report_json(report)}};
  }

  int step = req.value("step", 0);
  bool success = req.value("success", false);
  double gamma_belief = req.value("gamma_belief", 0.95);

  RewardBreakdown r =
      score_belief(prev, obs, next, world, history, step, success, gamma_belief);
  nlohmann::ordered_json rj;
  to_json(rj, r);
  return nlohmann::ordered_json{
      {"reward_breakdown", std::move(rj)},
      {"format_report", format_report_json(validate_format(next))}};
}

}  // namespace

std::string handle_reward_request(const std::string& line) {
  nlohmann::json req = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (req.is_discarded()) return error_response("malformed JSON").dump();
  if (!req.is_object()) return error_response("request must be a JSON object").dump();
  try {
    return score(req).dump();
  } catch (const std::exception& e) {
    return error_response(e.what()).dump();
  }
}

namespace {

void serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  while (true) {
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<size_t>(n));
    size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::string response = handle_reward_request(line) + "\n";
      size_t sent = 0;
      while (sent < response.size()) {
        ssize_t k = ::send(fd, response.data() + sent, response.size() - sent, 0);
        if (k <= 0) { ::close(fd); return; }
        sent += static_cast<size_t>(k);
      }
    }
  }
  ::close(fd);
}

}  // namespace

bool run_reward_server(const std::string& host, int port,
                       const std::atomic<bool>& stop) {
  int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) return false;
  int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listener);
    return false;
  }
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listener, 16) < 0) {
    ::close(listener);
    return false;
  }
  log_info("reward server listening on " + host + ":" + std::to_string(port));

  std::vector<std::thread> workers;
  while (!stop.load()) {
    timeval tv{0, 200000};
    fd_set readable;
    FD_ZERO(&readable);
    FD_SET(listener, &readable);
    int ready = ::select(listener + 1, &readable, nullptr, nullptr, &tv);
    if (ready <= 0) continue;
    int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    workers.emplace_back(serve_connection, fd);
  }
  ::close(listener);
  for (std::thread& t : workers) t.join();
  return true;
}

}  // namespace brace

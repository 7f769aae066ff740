// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "json.hpp"

#include "brace/protocol.hpp"

using namespace brace;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

const std::string kRequestsPath =
    std::string(BRACE_TEST_DATA_DIR) + "/protocol_requests.ndjson";
const std::string kGoldenPath =
    std::string(BRACE_TEST_DATA_DIR) + "/protocol_responses.ndjson";

}  // namespace

TEST_CASE("scoring requests reproduce the committed golden responses") {
  auto requests = read_lines(kRequestsPath);
  auto golden = read_lines(kGoldenPath);
  REQUIRE(requests.size() == 20);
  REQUIRE(golden.size() == requests.size());
  for (size_t i = 0; i < requests.size(); ++i) {
    CAPTURE(i);
    CHECK(handle_reward_request(requests[i]) == golden[i]);
  }
}

TEST_CASE("two in-process passes over the suite are byte-identical") {
  auto requests = read_lines(kRequestsPath);
  for (const std::string& r : requests)
    CHECK(handle_reward_request(r) == handle_reward_request(r));
}

TEST_CASE("response structure for the main request kinds") {
  auto requests = read_lines(kRequestsPath);
  // well-formed belief
  auto j = nlohmann::json::parse(handle_reward_request(requests[0]));
  CHECK(j.contains("reward_breakdown"));
  CHECK(j["format_report"]["valid"] == true);
  CHECK(j["reward_breakdown"]["r_format"] == 1.0);

  // empty belief text is a parse failure, not a transport error
  j = nlohmann::json::parse(handle_reward_request(requests[1]));
  CHECK(j["format_report"]["valid"] == false);
  CHECK(j["format_report"]["violations"][0]["rule_id"] == "parse");
  CHECK(j["reward_breakdown"]["composite"] == 0.0);

  // malformed JSON
  j = nlohmann::json::parse(handle_reward_request(requests[2]));
  CHECK(j.contains("error"));

  // forward-looking phrase zeroes the gate but still reports violations
  j = nlohmann::json::parse(handle_reward_request(requests[3]));
  CHECK(j["format_report"]["valid"] == false);
  CHECK(j["format_report"]["violations"][0]["rule_id"] == "R3");
  CHECK(j["reward_breakdown"]["composite"] == 0.0);

  // prose-only belief: nothing verifiable
  j = nlohmann::json::parse(handle_reward_request(requests[4]));
  CHECK(j["reward_breakdown"]["counts"]["n_correct"] == 0);
  CHECK(j["reward_breakdown"]["counts"]["n_incorrect"] == 0);
  CHECK(j["reward_breakdown"]["counts"]["n_unverifiable"] == 2);
}

namespace {

std::vector<std::string> roundtrip_over_tcp(const std::vector<std::string>& requests,
                                            int port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<uint16_t>(port));
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  // the server thread may still be binding
  int rc = -1;
  for (int attempt = 0; attempt < 50 && rc != 0; ++attempt) {
    rc = ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    if (rc != 0) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  REQUIRE(rc == 0);

  std::string payload;
  for (const std::string& r : requests) payload += r + "\n";
  size_t sent = 0;
  while (sent < payload.size()) {
    ssize_t k = ::send(fd, payload.data() + sent, payload.size() - sent, 0);
    REQUIRE(k > 0);
    sent += static_cast<size_t>(k);
  }

  std::string received;
  char chunk[4096];
  while (static_cast<size_t>(
             std::count(received.begin(), received.end(), '\n')) < requests.size()) {
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    REQUIRE(n > 0);
    received.append(chunk, static_cast<size_t>(n));
  }
  ::close(fd);
  std::vector<std::string> lines;
  std::istringstream stream(received);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("the TCP server answers the suite in order") {
  auto requests = read_lines(kRequestsPath);
  auto golden = read_lines(kGoldenPath);
  const int port = 39417;
  std::atomic<bool> stop{false};
  std::thread server([&] { run_reward_server("127.0.0.1", port, stop); });

  auto lines = roundtrip_over_tcp(requests, port);
  REQUIRE(lines.size() == requests.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    CAPTURE(i);
    CHECK(lines[i] == golden[i]);
  }

  stop = true;
  server.join();
}

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#include "brace/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace brace {
namespace {

LogLevel parse_level() {
  const char* env = std::getenv("BRACE_LOG_LEVEL");
  if (!env) return LogLevel::Warn;
  std::string v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "warn") return LogLevel::Warn;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

const char* level_tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

std::mutex g_mutex;

}  // namespace

LogLevel log_threshold() {
  static const LogLevel level = parse_level();
  return level;
}

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_threshold())) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << "[" << level_tag(level) << "] " << message << '\n';
}

}  // namespace brace

// Copyright 2026 The brace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace brace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from BRACE_LOG_LEVEL (error/warn/info/debug), default warn.
LogLevel log_threshold();

void log_message(LogLevel level, const std::string& message);

inline void log_error(const std::string& m) { log_message(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log_message(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log_message(LogLevel::Debug, m); }

}  // namespace brace

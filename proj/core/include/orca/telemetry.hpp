// Copyright 2025 The Orca Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orca/common.hpp"

namespace orca {

struct SpanRecord {
  std::string trace_id;
  std::string span_id;
  std::optional<std::string> parent_span_id;
  std::string service;
  std::string pod;
  int64_t start_time = 0;  // unit given by TelemetryDataset::span_unit
  int64_t duration_us = 0;
  int status_code = 0;  // gRPC status, 0 = OK
  std::map<std::string, std::string> tags;

  friend bool operator==(const SpanRecord&, const SpanRecord&) = default;
};

// Closed metric-name vocabulary. Rows naming anything else are dropped at
// ingest with a warning.
inline constexpr const char* kKnownMetrics[] = {
    "cpu_usage",   "memory_usage", "disk_read_bytes", "network_transmit",
    "request",     "response",     "rrt",             "timeout",
    "client_error", "server_error", "error_ratio",
};

bool is_known_metric(const std::string& name);
// Maps common aliases ("cpu", "error_rate", ...) onto the closed set.
// Returns empty string when nothing matches.
std::string normalize_metric_name(const std::string& name);
std::string_view metric_unit(const std::string& metric_name);

struct MetricSample {
  std::string component;
  std::string metric_name;
  int64_t timestamp = 0;  // unit given by TelemetryDataset::metric_unit
  double value = 0.0;

  friend bool operator==(const MetricSample&, const MetricSample&) = default;
};

struct LogRecord {
  std::string component;
  int64_t timestamp = 0;  // unit given by TelemetryDataset::log_unit
  std::string message;

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct TelemetryDataset {
  std::vector<SpanRecord> spans;
  std::vector<MetricSample> metrics;
  std::vector<LogRecord> logs;
  TimeWindow case_window;

  // Authoritative units for the timestamp fields above. Ingest fills them
  // from per-file sniffing; preprocessing normalizes everything to
  // microseconds.
  TimeUnit span_unit = TimeUnit::Microseconds;
  TimeUnit metric_unit = TimeUnit::Seconds;
  TimeUnit log_unit = TimeUnit::Microseconds;

  std::vector<std::string> warnings;

  bool empty() const { return spans.empty() && metrics.empty() && logs.empty(); }
};

}  // namespace orca

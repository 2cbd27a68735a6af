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

#include "orca/telemetry.hpp"

#include <algorithm>
#include <cctype>

namespace orca {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

bool is_known_metric(const std::string& name) {
  for (const char* m : kKnownMetrics) {
    if (name == m) return true;
  }
  return false;
}

std::string normalize_metric_name(const std::string& raw) {
  std::string name = lower(raw);
  if (is_known_metric(name)) return name;
  static const std::map<std::string, std::string> kAliases = {
      {"cpu", "cpu_usage"},
      {"cpu_percent", "cpu_usage"},
      {"memory", "memory_usage"},
      {"mem_usage", "memory_usage"},
      {"disk_read", "disk_read_bytes"},
      {"network", "network_transmit"},
      {"network_transmit_bytes", "network_transmit"},
      {"requests", "request"},
      {"req", "request"},
      {"responses", "response"},
      {"resp", "response"},
      {"rrt_ms", "rrt"},
      {"latency", "rrt"},
      {"timeouts", "timeout"},
      {"client_errors", "client_error"},
      {"server_errors", "server_error"},
      {"error_rate", "error_ratio"},
  };
  auto it = kAliases.find(name);
  if (it != kAliases.end()) return it->second;
  return "";
}

std::string_view metric_unit(const std::string& metric_name) {
  if (metric_name == "cpu_usage" || metric_name == "memory_usage") return "percent";
  if (metric_name == "disk_read_bytes" || metric_name == "network_transmit") return "bytes";
  if (metric_name == "rrt") return "ms";
  if (metric_name == "error_ratio") return "ratio";
  return "count";
}

}  // namespace orca

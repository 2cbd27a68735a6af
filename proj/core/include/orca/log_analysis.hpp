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

#include <map>
#include <string>
#include <vector>

#include "orca/telemetry.hpp"

namespace orca {

struct KeywordConfig {
  // Case-insensitive substrings.
  std::vector<std::string> keywords = {"Error", "Timeout", "Exception", "Failed"};
  // Matched as standalone digit runs, never inside a longer number.
  std::vector<int> status_codes = {400, 404, 500};
  size_t max_entries_per_component = 50;

  void validate() const;
};

struct LogAnomalyEntry {
  int64_t timestamp_us = 0;
  std::string pattern;
  std::string excerpt;  // at most 512 chars
};

struct LogAnomalyReport {
  std::map<ComponentId, std::vector<LogAnomalyEntry>> entries;
  // Exact match counts before truncation.
  std::map<ComponentId, int> per_component_count;
  size_t truncation_limit = 0;

  bool empty() const { return per_component_count.empty(); }
};

// True when the message contains a keyword or a standalone status code;
// the first matching pattern (keywords first, config order) lands in
// *matched when non-null.
bool matches_keywords(const std::string& message, const KeywordConfig& cfg,
                      std::string* matched);

// Filters grouped logs down to matching entries, keeping at most
// max_entries_per_component oldest entries per component while counting
// every match.
LogAnomalyReport filter_logs(const std::map<ComponentId, std::vector<LogRecord>>& log_groups,
                             const KeywordConfig& cfg);

}  // namespace orca

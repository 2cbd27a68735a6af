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

#include "orca/log_analysis.hpp"

#include <algorithm>
#include <cctype>

#include "orca/errors.hpp"

namespace orca {

namespace {

constexpr size_t kExcerptLimit = 512;

std::string to_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains_standalone_number(const std::string& message, const std::string& code) {
  size_t i = 0;
  while (i < message.size()) {
    if (!std::isdigit(static_cast<unsigned char>(message[i]))) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < message.size() && std::isdigit(static_cast<unsigned char>(message[j]))) ++j;
    if (message.compare(i, j - i, code) == 0) return true;
    i = j;
  }
  return false;
}

}  // namespace

void KeywordConfig::validate() const {
  if (max_entries_per_component == 0)
    throw Error(ErrorCode::InvalidConfig, "max_entries_per_component must be >= 1");
  for (const auto& k : keywords)
    if (k.empty()) throw Error(ErrorCode::InvalidConfig, "empty keyword");
  for (int c : status_codes)
    if (c <= 0) throw Error(ErrorCode::InvalidConfig, "status codes must be positive");
}

bool matches_keywords(const std::string& message, const KeywordConfig& cfg,
                      std::string* matched) {
  const std::string lower = to_lower(message);
  for (const auto& kw : cfg.keywords) {
    if (kw.empty()) continue;
    if (lower.find(to_lower(kw)) != std::string::npos) {
      if (matched) *matched = kw;
      return true;
    }
  }
  for (int code : cfg.status_codes) {
    if (contains_standalone_number(message, std::to_string(code))) {
      if (matched) *matched = std::to_string(code);
      return true;
    }
  }
  return false;
}

LogAnomalyReport filter_logs(const std::map<ComponentId, std::vector<LogRecord>>& log_groups,
                             const KeywordConfig& cfg) {
  cfg.validate();
  LogAnomalyReport rep;
  rep.truncation_limit = cfg.max_entries_per_component;

  for (const auto& [component, records] : log_groups) {
    int count = 0;
    std::vector<LogAnomalyEntry> kept;
    for (const auto& rec : records) {
      std::string pattern;
      if (!matches_keywords(rec.message, cfg, &pattern)) continue;
      ++count;
      if (kept.size() >= cfg.max_entries_per_component) continue;
      LogAnomalyEntry e;
      e.timestamp_us = rec.timestamp;
      e.pattern = std::move(pattern);
      e.excerpt = rec.message.substr(0, kExcerptLimit);
      kept.push_back(std::move(e));
    }
    if (count == 0) continue;
    rep.per_component_count[component] = count;
    rep.entries[component] = std::move(kept);
  }
  return rep;
}

}  // namespace orca

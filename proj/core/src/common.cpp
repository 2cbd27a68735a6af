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

#include "orca/common.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <ctime>

namespace orca {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Internal: return "Internal";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::FileNotReadable: return "FileNotReadable";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NoEvidence: return "NoEvidence";
    case ErrorCode::BackendTimeout: return "BackendTimeout";
    case ErrorCode::BackendHTTPError: return "BackendHTTPError";
    case ErrorCode::MalformedOutput: return "MalformedOutput";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::AmbiguousUnit: return "AmbiguousUnit";
    case ErrorCode::MisalignedSeries: return "MisalignedSeries";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::MinAccuracyFailed: return "MinAccuracyFailed";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) { return static_cast<int>(code); }

std::string_view time_unit_name(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::Seconds: return "seconds";
    case TimeUnit::Milliseconds: return "milliseconds";
    case TimeUnit::Microseconds: return "microseconds";
  }
  return "unknown";
}

int64_t to_micros(int64_t value, TimeUnit unit) {
  switch (unit) {
    case TimeUnit::Seconds: return value * 1'000'000;
    case TimeUnit::Milliseconds: return value * 1'000;
    case TimeUnit::Microseconds: return value;
  }
  return value;
}

std::string_view component_level_name(ComponentLevel level) {
  switch (level) {
    case ComponentLevel::Service: return "service";
    case ComponentLevel::Pod: return "pod";
    case ComponentLevel::Node: return "node";
  }
  return "unknown";
}

namespace {

// Returns the position of the trailing "-<digits>" ordinal, or npos.
size_t ordinal_pos(const std::string& name) {
  size_t dash = name.find_last_of('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= name.size()) {
    return std::string::npos;
  }
  for (size_t i = dash + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
      return std::string::npos;
    }
  }
  return dash;
}

}  // namespace

std::string service_of_pod(const std::string& pod_name) {
  size_t dash = ordinal_pos(pod_name);
  if (dash == std::string::npos) return pod_name;
  return pod_name.substr(0, dash);
}

ComponentId classify_component(const std::string& name) {
  size_t dash = ordinal_pos(name);
  if (dash != std::string::npos) {
    std::string base = name.substr(0, dash);
    if (base == "node" || base == "vm") {
      return {name, ComponentLevel::Node};
    }
    return {name, ComponentLevel::Pod};
  }
  return {name, ComponentLevel::Service};
}

std::string format_utc_us(int64_t epoch_us) {
  int64_t secs = epoch_us / kMicrosPerSecond;
  int64_t micros = epoch_us % kMicrosPerSecond;
  if (micros < 0) {
    micros += kMicrosPerSecond;
    secs -= 1;
  }
  std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[48];
  if (micros == 0) {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec);
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%06" PRId64 "Z",
                  tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                  tm.tm_min, tm.tm_sec, micros);
  }
  return buf;
}

std::string format_utc_s(int64_t epoch_s) {
  return format_utc_us(epoch_s * kMicrosPerSecond);
}

Result<int64_t> parse_utc_seconds(const std::string& text) {
  if (text.empty()) {
    return Result<int64_t>(ErrorCode::InvalidConfig, "empty timestamp");
  }
  bool digits_only = true;
  for (size_t i = (text[0] == '-') ? 1 : 0; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits_only = false;
      break;
    }
  }
  if (digits_only) {
    return Result<int64_t>(std::strtoll(text.c_str(), nullptr, 10));
  }
  std::tm tm{};
  int y, mo, d, h, mi, s;
  if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &s) != 6) {
    return Result<int64_t>(ErrorCode::InvalidConfig,
                           "unparsable timestamp: " + text);
  }
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = s;
  return Result<int64_t>(static_cast<int64_t>(timegm(&tm)));
}

}  // namespace orca

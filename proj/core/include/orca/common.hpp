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
#include <string>
#include <tuple>

#include "orca/errors.hpp"

namespace orca {

inline constexpr int64_t kMicrosPerSecond = 1'000'000;
inline constexpr int64_t kMicrosPerMinute = 60 * kMicrosPerSecond;
inline constexpr int64_t kMicrosPerHour = 60 * kMicrosPerMinute;

enum class TimeUnit { Seconds, Milliseconds, Microseconds };

std::string_view time_unit_name(TimeUnit unit);
int64_t to_micros(int64_t value, TimeUnit unit);

// Half-open case window [start, end) in epoch seconds.
struct TimeWindow {
  int64_t start_s = 0;
  int64_t end_s = 0;

  bool valid() const { return start_s < end_s; }
  int64_t start_us() const { return start_s * kMicrosPerSecond; }
  int64_t end_us() const { return end_s * kMicrosPerSecond; }
  bool contains_us(int64_t t_us) const {
    return t_us >= start_us() && t_us < end_us();
  }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class ComponentLevel { Service, Pod, Node };

std::string_view component_level_name(ComponentLevel level);

struct ComponentId {
  std::string name;
  ComponentLevel level = ComponentLevel::Service;

  friend bool operator==(const ComponentId&, const ComponentId&) = default;
  friend bool operator<(const ComponentId& a, const ComponentId& b) {
    return std::tie(a.name, a.level) < std::tie(b.name, b.level);
  }
};

// "redis-cart-0" -> "redis-cart". Names without a trailing ordinal are
// returned unchanged. Node names ("node-3") are a special case handled by
// classify_component.
std::string service_of_pod(const std::string& pod_name);

// Pattern-based level inference: trailing "-<digits>" marks a pod unless the
// base is the reserved node prefix; bare names are services.
ComponentId classify_component(const std::string& name);

// ISO 8601 UTC rendering/parsing helpers used by serializers and the CLI.
std::string format_utc_us(int64_t epoch_us);
std::string format_utc_s(int64_t epoch_s);
// Accepts "2025-06-05T18:10:05Z" or plain epoch seconds.
Result<int64_t> parse_utc_seconds(const std::string& text);

}  // namespace orca

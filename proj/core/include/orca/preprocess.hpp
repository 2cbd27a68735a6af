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
#include <utility>
#include <vector>

#include "orca/telemetry.hpp"

namespace orca {

struct ComponentSeries {
  ComponentId component;
  std::string metric_name;
  // (timestamp µs, value), non-decreasing in timestamp after sort_and_bucket.
  std::vector<std::pair<int64_t, double>> points;
  // Hour-aligned window (seconds) containing every point.
  TimeWindow bucket;
  // Service rollups synthesized from pod series. Derived series are excluded
  // from record-conservation accounting.
  bool derived = false;

  friend bool operator==(const ComponentSeries&, const ComponentSeries&) = default;
};

struct PreprocessedDataset {
  TimeWindow case_window;
  // trace_id -> spans, time-sorted after sort_and_bucket.
  std::map<std::string, std::vector<SpanRecord>> trace_groups;
  std::vector<ComponentSeries> metric_series;
  std::map<ComponentId, std::vector<LogRecord>> log_groups;
  std::vector<std::string> warnings;
};

// Expresses every timestamp in microseconds since epoch, UTC. Idempotent.
TelemetryDataset to_utc(const TelemetryDataset& dataset);

// Groups spans by trace, metrics by (component, metric), logs by component.
// Pod metric series additionally produce service-level rollups (sums for
// count metrics, means for rates and latencies), marked derived. Records
// with empty component names go to a catch-all group with a warning.
// Requires a UTC-normalized dataset.
PreprocessedDataset aggregate_by_component(const TelemetryDataset& dataset);

// Sorts every group ascending by timestamp (stable: equal timestamps keep
// ingest order) and splits metric series at UTC hour boundaries. Idempotent.
PreprocessedDataset sort_and_bucket(const PreprocessedDataset& pre);

// to_utc, aggregate_by_component and sort_and_bucket composed.
PreprocessedDataset preprocess(const TelemetryDataset& dataset);

// Floors an epoch-seconds value to its UTC hour.
int64_t floor_hour_s(int64_t epoch_s);

}  // namespace orca

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

#include <string>
#include <vector>

#include "orca/telemetry.hpp"

namespace orca {

struct DatasetPaths {
  std::vector<std::string> trace_paths;
  std::vector<std::string> metric_paths;
  std::vector<std::string> log_paths;

  bool empty() const {
    return trace_paths.empty() && metric_paths.empty() && log_paths.empty();
  }
};

// Loads all records whose timestamp falls inside `window` (half-open).
// Column order in the files is irrelevant; unknown extra columns are ignored.
// Throws Error with FileNotReadable, SchemaMismatch, EmptyWindow,
// InvalidConfig (duplicate path / no paths) or AmbiguousUnit.
TelemetryDataset load_dataset(const DatasetPaths& paths, const TimeWindow& window);

// Returns the unit under which the sample's median lands between the years
// 2000 and 2100 UTC. The three candidate ranges are disjoint, so at most one
// unit can match. Throws Error(AmbiguousUnit) when none does.
TimeUnit sniff_timestamp_unit(const std::vector<int64_t>& sample);

}  // namespace orca

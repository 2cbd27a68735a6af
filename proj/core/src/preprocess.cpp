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

#include "orca/preprocess.hpp"

#include <algorithm>

namespace orca {

namespace {

constexpr const char* kCatchAllComponent = "unknown";

// Count-like metrics sum across pods in a service rollup; everything else
// (utilization, latency, ratio) averages.
bool is_additive_metric(const std::string& name) {
  return name == "request" || name == "response" || name == "timeout" ||
         name == "client_error" || name == "server_error" ||
         name == "disk_read_bytes" || name == "network_transmit";
}

ComponentId resolve_component(const std::string& name,
                              std::vector<std::string>& warnings,
                              size_t& unresolved) {
  if (name.empty()) {
    if (unresolved == 0) {
      warnings.push_back(
          "records with empty component names routed to catch-all group");
    }
    ++unresolved;
    return {kCatchAllComponent, ComponentLevel::Service};
  }
  return classify_component(name);
}

TimeWindow hour_aligned_cover(const TimeWindow& w) {
  TimeWindow out;
  out.start_s = floor_hour_s(w.start_s);
  out.end_s = floor_hour_s(w.end_s);
  if (out.end_s < w.end_s) out.end_s += 3600;
  if (out.end_s == out.start_s) out.end_s += 3600;
  return out;
}

}  // namespace

int64_t floor_hour_s(int64_t epoch_s) {
  int64_t rem = epoch_s % 3600;
  if (rem < 0) rem += 3600;
  return epoch_s - rem;
}

TelemetryDataset to_utc(const TelemetryDataset& dataset) {
  TelemetryDataset out = dataset;
  for (auto& span : out.spans)
    span.start_time = to_micros(span.start_time, dataset.span_unit);
  for (auto& sample : out.metrics)
    sample.timestamp = to_micros(sample.timestamp, dataset.metric_unit);
  for (auto& log : out.logs)
    log.timestamp = to_micros(log.timestamp, dataset.log_unit);
  out.span_unit = TimeUnit::Microseconds;
  out.metric_unit = TimeUnit::Microseconds;
  out.log_unit = TimeUnit::Microseconds;
  return out;
}

PreprocessedDataset aggregate_by_component(const TelemetryDataset& dataset) {
  if (dataset.span_unit != TimeUnit::Microseconds ||
      dataset.metric_unit != TimeUnit::Microseconds ||
      dataset.log_unit != TimeUnit::Microseconds) {
    throw Error(ErrorCode::Internal,
                "aggregate_by_component requires a UTC-normalized dataset");
  }

  PreprocessedDataset out;
  out.case_window = dataset.case_window;
  out.warnings = dataset.warnings;
  size_t unresolved = 0;

  for (const auto& span : dataset.spans) {
    out.trace_groups[span.trace_id].push_back(span);
  }

  const TimeWindow cover = hour_aligned_cover(dataset.case_window);
  std::map<std::pair<ComponentId, std::string>,
           std::vector<std::pair<int64_t, double>>>
      series_points;
  for (const auto& sample : dataset.metrics) {
    ComponentId id = resolve_component(sample.component, out.warnings, unresolved);
    series_points[{id, sample.metric_name}].emplace_back(sample.timestamp,
                                                         sample.value);
  }

  // Service rollups: pod series of the same (service, metric) merged by
  // exact timestamp, summing count metrics and averaging the rest.
  std::map<std::pair<ComponentId, std::string>,
           std::map<int64_t, std::pair<double, int>>>
      rollup_acc;
  for (const auto& [key, points] : series_points) {
    const auto& [component, metric] = key;
    if (component.level != ComponentLevel::Pod) continue;
    ComponentId service{service_of_pod(component.name), ComponentLevel::Service};
    auto& acc = rollup_acc[{service, metric}];
    for (const auto& [ts, value] : points) {
      auto& cell = acc[ts];
      cell.first += value;
      cell.second += 1;
    }
  }

  for (auto& [key, points] : series_points) {
    ComponentSeries s;
    s.component = key.first;
    s.metric_name = key.second;
    s.points = std::move(points);
    s.bucket = cover;
    out.metric_series.push_back(std::move(s));
  }
  for (const auto& [key, acc] : rollup_acc) {
    ComponentSeries s;
    s.component = key.first;
    s.metric_name = key.second;
    s.bucket = cover;
    s.derived = true;
    const bool additive = is_additive_metric(key.second);
    for (const auto& [ts, cell] : acc) {
      s.points.emplace_back(ts, additive ? cell.first : cell.first / cell.second);
    }
    out.metric_series.push_back(std::move(s));
  }

  for (const auto& log : dataset.logs) {
    ComponentId id = resolve_component(log.component, out.warnings, unresolved);
    out.log_groups[id].push_back(log);
  }

  if (unresolved > 0) {
    out.warnings.back() = std::to_string(unresolved) +
                          " records with empty component names routed to "
                          "catch-all group";
  }
  return out;
}

PreprocessedDataset sort_and_bucket(const PreprocessedDataset& pre) {
  PreprocessedDataset out;
  out.case_window = pre.case_window;
  out.warnings = pre.warnings;
  out.trace_groups = pre.trace_groups;
  out.log_groups = pre.log_groups;

  for (auto& [trace_id, spans] : out.trace_groups) {
    std::stable_sort(spans.begin(), spans.end(),
                     [](const SpanRecord& a, const SpanRecord& b) {
                       return a.start_time < b.start_time;
                     });
  }
  for (auto& [component, logs] : out.log_groups) {
    std::stable_sort(logs.begin(), logs.end(),
                     [](const LogRecord& a, const LogRecord& b) {
                       return a.timestamp < b.timestamp;
                     });
  }

  for (const auto& series : pre.metric_series) {
    std::vector<std::pair<int64_t, double>> points = series.points;
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    // Split at UTC hour boundaries; each shard gets its one-hour bucket.
    std::map<int64_t, ComponentSeries> shards;
    for (const auto& point : points) {
      const int64_t hour = floor_hour_s(point.first / kMicrosPerSecond);
      auto [it, inserted] = shards.try_emplace(hour);
      if (inserted) {
        it->second.component = series.component;
        it->second.metric_name = series.metric_name;
        it->second.derived = series.derived;
        it->second.bucket = TimeWindow{hour, hour + 3600};
      }
      it->second.points.push_back(point);
    }
    if (shards.empty()) {
      // Preserve empty series so analyzers can report them as too short.
      ComponentSeries empty = series;
      empty.bucket = TimeWindow{floor_hour_s(series.bucket.start_s),
                                floor_hour_s(series.bucket.start_s) + 3600};
      out.metric_series.push_back(std::move(empty));
      continue;
    }
    for (auto& [hour, shard] : shards) {
      out.metric_series.push_back(std::move(shard));
    }
  }

  std::stable_sort(out.metric_series.begin(), out.metric_series.end(),
                   [](const ComponentSeries& a, const ComponentSeries& b) {
                     return std::tie(a.component, a.metric_name, a.derived,
                                     a.bucket.start_s) <
                            std::tie(b.component, b.metric_name, b.derived,
                                     b.bucket.start_s);
                   });
  return out;
}

PreprocessedDataset preprocess(const TelemetryDataset& dataset) {
  return sort_and_bucket(aggregate_by_component(to_utc(dataset)));
}

}  // namespace orca

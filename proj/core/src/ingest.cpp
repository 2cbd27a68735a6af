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

#include "orca/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "orca/parquet/parquet.hpp"

namespace orca {

namespace {

using parquet::Column;
using parquet::Table;

// Epoch bounds for 2000-01-01 and 2100-01-01 UTC, in seconds.
constexpr int64_t kYear2000 = 946684800;
constexpr int64_t kYear2100 = 4102444800;

int64_t micros_per(TimeUnit unit) {
  switch (unit) {
    case TimeUnit::Seconds: return 1'000'000;
    case TimeUnit::Milliseconds: return 1'000;
    case TimeUnit::Microseconds: return 1;
  }
  return 1;
}

TimeUnit finer(TimeUnit a, TimeUnit b) {
  return micros_per(a) < micros_per(b) ? a : b;
}

// Converts a value from `from` into the (finer or equal) unit `to`.
int64_t rescale(int64_t value, TimeUnit from, TimeUnit to) {
  return value * (micros_per(from) / micros_per(to));
}

const Column* find_any(const Table& table, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (const Column* c = table.find_relaxed(n)) return c;
  }
  return nullptr;
}

const Column& require_any(const Table& table, const std::string& path,
                          std::initializer_list<const char*> names) {
  if (const Column* c = find_any(table, names)) return *c;
  throw Error(ErrorCode::SchemaMismatch,
              path + ": required column '" + *names.begin() + "' not found");
}

int64_t int_at(const Column& c, size_t i) {
  if (c.is_integer()) return c.ints[i];
  if (c.is_floating()) return static_cast<int64_t>(std::llround(c.doubles[i]));
  return 0;
}

double num_at(const Column& c, size_t i) {
  if (c.is_integer()) return static_cast<double>(c.ints[i]);
  if (c.is_floating()) return c.doubles[i];
  return 0.0;
}

std::string str_at(const Column& c, size_t i) {
  if (c.type == parquet::PhysicalType::ByteArray) return c.strings[i];
  if (c.is_integer()) return std::to_string(c.ints[i]);
  return std::to_string(c.doubles[i]);
}

// Sniffs the unit of a timestamp column; returns nullopt for empty columns.
std::optional<TimeUnit> sniff_column(const Column& col, const std::string& path) {
  std::vector<int64_t> sample;
  for (size_t i = 0; i < col.num_rows() && sample.size() < 256; ++i) {
    if (!col.defined[i]) continue;
    int64_t v = int_at(col, i);
    if (v > 0) sample.push_back(v);
  }
  if (sample.empty()) {
    if (col.num_rows() == 0) return std::nullopt;
    throw Error(ErrorCode::AmbiguousUnit,
                path + ": column '" + col.name + "' has no positive timestamps");
  }
  try {
    return sniff_timestamp_unit(sample);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": column '" + col.name + "': " + e.what());
  }
}

// Extracts a parent span id from a reference cell, which is either a plain
// span id or a JSON array of reference objects. Returns the number of
// parents found so callers can warn on multi-parent spans.
std::pair<std::optional<std::string>, int> parse_parent(const std::string& raw) {
  if (raw.empty()) return {std::nullopt, 0};
  if (raw.front() != '[' && raw.front() != '{') return {raw, 1};
  nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
  if (doc.is_discarded()) return {std::nullopt, 0};
  auto extract = [](const nlohmann::json& obj) -> std::optional<std::string> {
    for (const char* key : {"spanID", "span_id", "spanId", "parent_span_id"}) {
      if (obj.contains(key) && obj[key].is_string()) {
        std::string v = obj[key].get<std::string>();
        if (!v.empty()) return v;
      }
    }
    return std::nullopt;
  };
  if (doc.is_object()) return {extract(doc), 1};
  if (doc.is_array()) {
    std::optional<std::string> first;
    int count = 0;
    for (const auto& item : doc) {
      if (!item.is_object()) continue;
      auto p = extract(item);
      if (p) {
        ++count;
        if (!first) first = p;
      }
    }
    return {first, count};
  }
  return {std::nullopt, 0};
}

std::map<std::string, std::string> parse_tags(const std::string& raw) {
  std::map<std::string, std::string> tags;
  if (raw.empty()) return tags;
  nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return tags;
  for (const auto& [key, value] : doc.items()) {
    if (value.is_string()) {
      tags[key] = value.get<std::string>();
    } else {
      tags[key] = value.dump();
    }
  }
  return tags;
}

struct LoadedFile {
  std::string path;
  Table table;
  std::optional<TimeUnit> unit;
};

std::vector<LoadedFile> load_files(const std::vector<std::string>& paths,
                                   std::initializer_list<const char*> ts_names,
                                   bool ts_required) {
  std::vector<LoadedFile> files;
  for (const auto& path : paths) {
    LoadedFile f;
    f.path = path;
    f.table = parquet::read_table(path);
    const Column* ts = find_any(f.table, ts_names);
    if (!ts && ts_required) {
      throw Error(ErrorCode::SchemaMismatch,
                  path + ": required column '" + *ts_names.begin() + "' not found");
    }
    if (ts) f.unit = sniff_column(*ts, path);
    files.push_back(std::move(f));
  }
  return files;
}

TimeUnit modality_unit(const std::vector<LoadedFile>& files, TimeUnit fallback) {
  std::optional<TimeUnit> unit;
  for (const auto& f : files) {
    if (!f.unit) continue;
    unit = unit ? finer(*unit, *f.unit) : *f.unit;
  }
  return unit.value_or(fallback);
}

void warn_count(std::vector<std::string>& warnings, size_t count,
                const std::string& path, const std::string& what) {
  if (count == 0) return;
  warnings.push_back(path + ": " + std::to_string(count) + " " + what);
}

void load_traces(const std::vector<LoadedFile>& files, const TimeWindow& window,
                 TelemetryDataset& out) {
  out.span_unit = modality_unit(files, TimeUnit::Microseconds);
  for (const auto& f : files) {
    const Table& t = f.table;
    const Column& trace_id = require_any(t, f.path, {"trace_id", "traceid"});
    const Column& span_id = require_any(t, f.path, {"span_id", "spanid"});
    const Column& parent = require_any(
        t, f.path, {"references", "parent_span_id", "parentspanid", "parent"});
    const Column& service = require_any(
        t, f.path, {"service", "process", "service_name", "servicename"});
    const Column& start = require_any(
        t, f.path, {"start_time", "starttime", "timestamp", "time"});
    const Column& duration = require_any(t, f.path, {"duration", "duration_us"});
    const Column& tags = require_any(t, f.path, {"tags", "attributes"});
    const Column* pod = find_any(t, {"pod", "pod_name", "cmdb_id", "instance"});
    const Column* status =
        find_any(t, {"status_code", "statuscode", "grpc_status_code", "status"});

    const TimeUnit unit = f.unit.value_or(out.span_unit);
    size_t multi_parent = 0;
    size_t dropped = 0;
    for (size_t i = 0; i < static_cast<size_t>(t.num_rows); ++i) {
      if (!span_id.defined[i] || !start.defined[i]) {
        ++dropped;
        continue;
      }
      const int64_t start_native = int_at(start, i);
      const int64_t start_us = to_micros(start_native, unit);
      if (!window.contains_us(start_us)) continue;

      SpanRecord span;
      span.trace_id = trace_id.defined[i] ? str_at(trace_id, i) : "";
      span.span_id = str_at(span_id, i);
      if (span.span_id.empty()) {
        ++dropped;
        continue;
      }
      if (parent.defined[i]) {
        auto [parent_id, parent_count] = parse_parent(str_at(parent, i));
        span.parent_span_id = parent_id;
        if (parent_count > 1) ++multi_parent;
      }
      span.service = service.defined[i] ? str_at(service, i) : "";
      span.pod = (pod && pod->defined[i]) ? str_at(*pod, i) : span.service;
      span.start_time = rescale(start_native, unit, out.span_unit);
      span.duration_us =
          duration.defined[i] ? std::max<int64_t>(0, int_at(duration, i)) : 0;
      span.status_code =
          (status && status->defined[i]) ? static_cast<int>(int_at(*status, i)) : 0;
      if (tags.defined[i]) span.tags = parse_tags(str_at(tags, i));
      out.spans.push_back(std::move(span));
    }
    warn_count(out.warnings, multi_parent, f.path,
               "spans with multiple parents (first reference used)");
    warn_count(out.warnings, dropped, f.path, "spans with missing ids dropped");
  }
}

void load_metrics(const std::vector<LoadedFile>& files, const TimeWindow& window,
                  TelemetryDataset& out) {
  out.metric_unit = modality_unit(files, TimeUnit::Seconds);
  for (const auto& f : files) {
    const Table& t = f.table;
    const Column& component = require_any(
        t, f.path, {"component", "object", "cmdb_id", "instance", "pod"});
    const Column& ts = require_any(t, f.path, {"timestamp", "time", "ts"});
    const Column* name_col =
        find_any(t, {"metric_name", "kpi_name", "metric", "name"});
    const Column* value_col = find_any(t, {"value", "v"});

    const TimeUnit unit = f.unit.value_or(out.metric_unit);
    size_t unknown = 0;
    size_t non_finite = 0;

    auto emit = [&](size_t row, const std::string& raw_name, double value) {
      const std::string name = normalize_metric_name(raw_name);
      if (name.empty()) {
        ++unknown;
        return;
      }
      if (!std::isfinite(value)) {
        ++non_finite;
        return;
      }
      const int64_t ts_native = int_at(ts, row);
      if (!window.contains_us(to_micros(ts_native, unit))) return;
      MetricSample sample;
      sample.component = str_at(component, row);
      sample.metric_name = name;
      sample.timestamp = rescale(ts_native, unit, out.metric_unit);
      sample.value = value;
      out.metrics.push_back(std::move(sample));
    };

    if (name_col && value_col) {
      // Long layout: one (component, metric, timestamp, value) per row.
      for (size_t i = 0; i < static_cast<size_t>(t.num_rows); ++i) {
        if (!component.defined[i] || !ts.defined[i] || !name_col->defined[i] ||
            !value_col->defined[i]) {
          continue;
        }
        emit(i, str_at(*name_col, i), num_at(*value_col, i));
      }
    } else {
      // Wide layout: one column per metric, melted row by row.
      std::vector<const Column*> melted;
      for (const auto& col : t.columns) {
        if (&col == &component || &col == &ts) continue;
        if (col.type == parquet::PhysicalType::ByteArray) continue;
        if (!normalize_metric_name(col.name).empty()) melted.push_back(&col);
      }
      if (melted.empty()) {
        throw Error(ErrorCode::SchemaMismatch,
                    f.path + ": no metric value columns found "
                             "(neither long nor wide layout)");
      }
      for (size_t i = 0; i < static_cast<size_t>(t.num_rows); ++i) {
        if (!component.defined[i] || !ts.defined[i]) continue;
        for (const Column* col : melted) {
          if (!col->defined[i]) continue;
          emit(i, col->name, num_at(*col, i));
        }
      }
    }
    warn_count(out.warnings, unknown, f.path, "samples with unknown metric names dropped");
    warn_count(out.warnings, non_finite, f.path, "samples with non-finite values dropped");
  }
}

void load_logs(const std::vector<LoadedFile>& files, const TimeWindow& window,
               TelemetryDataset& out) {
  out.log_unit = modality_unit(files, TimeUnit::Microseconds);
  for (const auto& f : files) {
    const Table& t = f.table;
    const Column& component = require_any(
        t, f.path, {"component", "object", "cmdb_id", "instance", "pod"});
    const Column& ts = require_any(t, f.path, {"timestamp", "time", "ts"});
    const Column& message = require_any(
        t, f.path, {"message", "log", "body", "text", "value"});

    const TimeUnit unit = f.unit.value_or(out.log_unit);
    size_t blank = 0;
    for (size_t i = 0; i < static_cast<size_t>(t.num_rows); ++i) {
      if (!component.defined[i] || !ts.defined[i] || !message.defined[i]) {
        ++blank;
        continue;
      }
      std::string text = str_at(message, i);
      const bool all_space =
          std::all_of(text.begin(), text.end(),
                      [](unsigned char c) { return std::isspace(c); });
      if (text.empty() || all_space) {
        ++blank;
        continue;
      }
      const int64_t ts_native = int_at(ts, i);
      if (!window.contains_us(to_micros(ts_native, unit))) continue;
      LogRecord rec;
      rec.component = str_at(component, i);
      rec.timestamp = rescale(ts_native, unit, out.log_unit);
      rec.message = std::move(text);
      out.logs.push_back(std::move(rec));
    }
    warn_count(out.warnings, blank, f.path, "blank log messages dropped");
  }
}

}  // namespace

TimeUnit sniff_timestamp_unit(const std::vector<int64_t>& sample) {
  if (sample.empty()) {
    throw Error(ErrorCode::AmbiguousUnit, "empty timestamp sample");
  }
  std::vector<int64_t> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  const int64_t median = sorted[sorted.size() / 2];
  const struct {
    TimeUnit unit;
    int64_t lo, hi;
  } ranges[] = {
      {TimeUnit::Seconds, kYear2000, kYear2100},
      {TimeUnit::Milliseconds, kYear2000 * 1'000, kYear2100 * 1'000},
      {TimeUnit::Microseconds, kYear2000 * 1'000'000, kYear2100 * 1'000'000},
  };
  for (const auto& r : ranges) {
    if (median >= r.lo && median < r.hi) return r.unit;
  }
  throw Error(ErrorCode::AmbiguousUnit,
              "median timestamp " + std::to_string(median) +
                  " fits no supported unit (seconds/millis/micros, 2000-2100)");
}

TelemetryDataset load_dataset(const DatasetPaths& paths, const TimeWindow& window) {
  if (!window.valid()) {
    throw Error(ErrorCode::EmptyWindow,
                "case window start must precede end (got [" +
                    std::to_string(window.start_s) + ", " +
                    std::to_string(window.end_s) + "))");
  }
  if (paths.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no input paths given");
  }
  std::set<std::string> seen;
  for (const auto* list : {&paths.trace_paths, &paths.metric_paths, &paths.log_paths}) {
    for (const auto& p : *list) {
      if (!seen.insert(p).second) {
        throw Error(ErrorCode::InvalidConfig, "duplicate input path: " + p);
      }
    }
  }

  TelemetryDataset out;
  out.case_window = window;
  load_traces(load_files(paths.trace_paths,
                         {"start_time", "starttime", "timestamp", "time"},
                         /*ts_required=*/true),
              window, out);
  load_metrics(load_files(paths.metric_paths, {"timestamp", "time", "ts"},
                          /*ts_required=*/true),
               window, out);
  load_logs(load_files(paths.log_paths, {"timestamp", "time", "ts"},
                       /*ts_required=*/true),
            window, out);
  return out;
}

}  // namespace orca

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

#include "orca/preprocess.hpp"

namespace orca {

struct DetectorConfig {
  double z_threshold = 3.0;
  // Least-squares slope threshold, metric units per minute.
  double trend_slope_threshold = 5.0;
  double mismatch_ratio_threshold = 0.1;
  double pelt_penalty_multiplier = 3.0;
  int min_segment_length = 2;
  // Per-metric-name overrides for the two thresholds above.
  std::map<std::string, double> z_threshold_by_metric;
  std::map<std::string, double> trend_threshold_by_metric;

  void validate() const;
};

enum class AnomalyKind { Threshold, Trend, ChangePoint, Mismatch };

std::string_view anomaly_kind_name(AnomalyKind kind);

struct MetricAnomaly {
  ComponentId component;
  std::string metric_name;
  AnomalyKind kind = AnomalyKind::Threshold;
  int64_t timestamp_us = 0;
  double severity = 0.0;
  std::string detail;
};

struct MetricAnomalyReport {
  std::vector<MetricAnomaly> anomalies;
  std::map<ComponentId, double> per_component_score;
  std::vector<std::string> warnings;

  bool empty() const { return anomalies.empty(); }
};

// Robust z-score detector: flags |x - median| / (1.4826 * MAD) > z_threshold.
// With zero MAD any point off the median is flagged with severity equal to
// its absolute deviation. Series under 4 points yield nothing.
std::vector<MetricAnomaly> detect_threshold_anomalies(const ComponentSeries& series,
                                                      const DetectorConfig& cfg);

// Least-squares slope over the series (one bucket); flags |slope| above the
// per-minute threshold with severity |slope| / threshold. Needs >= 5 points.
std::vector<MetricAnomaly> detect_trend_anomalies(const ComponentSeries& series,
                                                  const DetectorConfig& cfg);

// Flags timestamps where |req - resp| / max(req, 1) exceeds the configured
// ratio. Throws Error(MisalignedSeries) when buckets or components differ.
std::vector<MetricAnomaly> detect_mismatch(const ComponentSeries& requests,
                                           const ComponentSeries& responses,
                                           const DetectorConfig& cfg);

// Penalty used by pelt_change_points for a given series and config.
double pelt_penalty(const std::vector<double>& values, const DetectorConfig& cfg);

// Exact penalized optimal partitioning for an L2 mean-shift cost:
// minimizes sum of segment costs + penalty * (#segments - 1) with
// cost(segment) = sum (x - segment mean)^2 and
// penalty = pelt_penalty_multiplier * sigma^2 * log n, where sigma is the
// median absolute successive difference scaled to a normal-noise sigma
// (a tiny scale-relative floor keeps the penalty positive on noise-free
// series). Returned indices mark the first point of each new segment.
// Pruned candidates are provably never optimal (ties included), so the
// result equals the unpruned dynamic program exactly.
// Throws Error(SeriesTooShort) when n < 2 * min_segment_length.
std::vector<int> pelt_change_points(const std::vector<double>& values,
                                    const DetectorConfig& cfg);

// pelt_change_points on a series, reporting each split as an anomaly whose
// severity is the level shift normalized by the series' robust scale.
std::vector<MetricAnomaly> detect_change_point_anomalies(
    const ComponentSeries& series, const DetectorConfig& cfg);

// Runs every detector over every series (deriving error_ratio from error and
// request counts when absent) and merges the findings. Per-series detector
// errors become warnings, never failures.
MetricAnomalyReport analyze_metrics(const PreprocessedDataset& pre,
                                    const DetectorConfig& cfg);

}  // namespace orca

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

#include <optional>
#include <string>
#include <vector>

#include "orca/log_analysis.hpp"
#include "orca/metric_analysis.hpp"
#include "orca/preprocess.hpp"
#include "orca/trace_analysis.hpp"

namespace orca {

// How the three analysis layers combine before reasoning:
//  - Original:     no analysis; raw records serialized in time order and
//                  truncated, so large cases overflow the context budget.
//  - Early:        anomalous metrics anchor the context; logs attach to
//                  those anchors; call trees are not consulted.
//  - Intermediate: trace candidates anchor the context; metric and log
//                  evidence attach to existing anchors only.
//  - Final:        trace candidates anchor first, then metric and log
//                  evidence attach to anchors or open bundles of their own,
//                  so no modality's finding is lost.
enum class FusionStrategy { Original, Early, Intermediate, Final };

std::string_view fusion_strategy_name(FusionStrategy strategy);
FusionStrategy fusion_strategy_from_name(const std::string& name);

struct FusionConfig {
  double weight_trace = 3.0;
  double weight_metric = 2.0;
  double weight_log = 1.0;
  size_t top_k = 5;
  size_t max_context_chars = 12000;
  FusionStrategy strategy = FusionStrategy::Final;

  void validate() const;
};

struct TraceEvidence {
  int error_count = 0;
  // Root-to-candidate component paths ending at this component.
  std::vector<std::vector<std::string>> paths;
};

struct MetricEvidence {
  std::vector<MetricAnomaly> anomalies;
  double total_severity = 0.0;
};

struct LogEvidence {
  // Exact match count; entries are truncated to the filter's limit.
  int match_count = 0;
  size_t truncation_limit = 0;
  std::vector<LogAnomalyEntry> entries;
};

struct EvidenceBundle {
  ComponentId component;
  std::optional<TraceEvidence> trace;
  std::optional<MetricEvidence> metric;
  std::optional<LogEvidence> log;
  // weight_trace * error_count + weight_metric * total_severity
  //   + weight_log * min(match_count, truncation_limit)
  double score = 0.0;
};

struct EvidenceContext {
  TimeWindow case_window;
  FusionStrategy strategy = FusionStrategy::Final;
  // Score-descending (ties by component name), at most top_k entries.
  std::vector<EvidenceBundle> bundles;
  // Original strategy only: time-ordered record dump, already truncated.
  std::string raw_dump;
  bool has_traces = false;
  bool has_metrics = false;
  bool has_logs = false;
};

// Full residual integration (the Final strategy): trace anchors first,
// metric and log evidence attach to them or open new bundles. Throws
// Error(NoEvidence) when nothing anomalous survives from any modality.
EvidenceContext integrate_evidence(const TraceAnomalyReport& traces,
                                   const MetricAnomalyReport& metrics,
                                   const LogAnomalyReport& logs,
                                   const TimeWindow& window,
                                   const FusionConfig& cfg);

// Builds the context for the configured strategy. The preprocessed dataset
// is only consulted by Original (for the raw dump).
EvidenceContext apply_strategy(const PreprocessedDataset& pre,
                               const TraceAnomalyReport& traces,
                               const MetricAnomalyReport& metrics,
                               const LogAnomalyReport& logs,
                               const FusionConfig& cfg);

// Deterministic JSON rendering, guaranteed not to exceed max_context_chars.
// When over budget, bundles shed their oldest-last log entries, extra
// anomalies and paths proportionally to their serialized size.
std::string serialize_context(const EvidenceContext& ctx, const FusionConfig& cfg);

}  // namespace orca

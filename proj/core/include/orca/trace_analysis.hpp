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

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "orca/telemetry.hpp"

namespace orca {

inline constexpr size_t kNoParent = static_cast<size_t>(-1);

struct CallNode {
  SpanRecord span;
  std::vector<size_t> children;  // indices into CallTree::nodes
  size_t parent = kNoParent;
  int depth = 0;  // root depth is 0
  bool is_anomalous = false;

  bool is_leaf() const { return children.empty(); }
};

struct CallTree {
  std::string trace_id;
  std::vector<CallNode> nodes;
  std::vector<size_t> roots;
  std::vector<std::string> warnings;
};

struct AnomalousLeaf {
  ComponentId component;
  int status_code = 0;
  int count = 0;

  friend bool operator==(const AnomalousLeaf&, const AnomalousLeaf&) = default;
};

struct TraceAnomalyReport {
  // Anomaly frontier: anomalous nodes none of whose children are anomalous,
  // grouped by (component, status code).
  std::vector<AnomalousLeaf> anomalous_leaves;
  // Root-to-frontier component-name paths, deduplicated and sorted.
  std::vector<std::vector<std::string>> propagation_paths;
  // Ranked by (error count desc, depth desc, name asc). When every observed
  // pod of a service is a candidate (and there are at least two), a
  // service-level candidate with the summed count joins the ranking.
  std::vector<ComponentId> candidate_components;
  std::map<std::string, int> candidate_error_counts;
  std::vector<std::string> warnings;

  bool empty() const { return anomalous_leaves.empty(); }
};

// The gRPC status of a span: the numeric field wins when non-zero, otherwise
// status-code tags are consulted.
int effective_status(const SpanRecord& span);

// The component a span's telemetry is attributed to (pod when named, else
// service).
ComponentId component_of_span(const SpanRecord& span);

// Builds one forest per trace with a worklist (never recursion over span
// depth). Spans whose parent id is missing from the trace become extra
// roots; a parent chain that revisits a span has the offending edge cut, the
// child promoted to root, and a warning recorded.
std::vector<CallTree> build_call_trees(
    const std::map<std::string, std::vector<SpanRecord>>& trace_groups);

TraceAnomalyReport detect_trace_anomalies(const std::vector<CallTree>& forest);

// Indented text rendering for debug dumps.
std::string render_tree(const CallTree& tree);

}  // namespace orca

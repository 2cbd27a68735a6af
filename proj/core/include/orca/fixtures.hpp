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
#include <map>
#include <string>
#include <vector>

#include "orca/common.hpp"

namespace orca {

// Injectable fault families. Each touches a fixed modality set:
//   error_status      span status codes only
//   rrt_spike         span status 4 + duration inflation + rrt series spike
//   cpu_stress        cpu_usage series only
//   req_resp_mismatch response counter drop only
//   log_burst         keyword-matching log lines only
//   pod_crash         span status 14 + response drop + server_error counter
enum class FaultKind {
  ErrorStatus,
  RrtSpike,
  CpuStress,
  ReqRespMismatch,
  LogBurst,
  PodCrash,
};

std::string_view fault_kind_name(FaultKind kind);
FaultKind fault_kind_from_name(const std::string& name);

struct FaultSpec {
  ComponentLevel level = ComponentLevel::Pod;
  std::string target;
  FaultKind fault_kind = FaultKind::ErrorStatus;
  TimeWindow window;
  // Kind-specific: rrt_spike = target latency in ms, cpu_stress = added
  // percent, req_resp_mismatch / pod_crash = dropped-response fraction in
  // (0, 1], log_burst = injected line count per targeted pod, error_status =
  // unused (status code is fixed). Must be positive.
  double magnitude = 1.0;
  // When false, trace-visible effects are suppressed and the fault shows up
  // only in metrics (or logs), modelling faults outside the RPC path.
  bool grpc_visible = true;
};

struct Topology {
  // service -> pod names, both sorted.
  std::map<std::string, std::vector<std::string>> service_pods;
  // pod -> node name.
  std::map<std::string, std::string> pod_node;

  // 10 storefront services with 3 pods each spread over 8 nodes, plus the
  // three single-pod database components.
  static Topology standard();

  bool has_component(const std::string& name, ComponentLevel level) const;
  // Pods affected by a fault on `name` at `level` (the pod itself, every pod
  // of a service, or every pod scheduled on a node). Sorted.
  std::vector<std::string> resolve_pods(const std::string& name,
                                        ComponentLevel level) const;
};

struct GroundTruth {
  ComponentId component;
  std::vector<std::string> fault_descriptions;
  std::vector<std::string> key_metrics;
  // Fault window padded by five minutes on both sides, clamped to the span;
  // the window a diagnosis run should use.
  TimeWindow case_window;
};

struct Scenario {
  Topology topology = Topology::standard();
  std::vector<FaultSpec> faults;
  uint64_t seed = 0;
  TimeWindow span;
};

struct GeneratedScenario {
  std::string directory;
  std::string trace_path;
  std::string metric_path;
  std::string log_path;
  std::string truth_path;
  GroundTruth truth;
};

// Validates the fault list against the topology and span and derives the
// single root cause (first fault's target; later faults must agree on the
// same root component). Throws Error(InvalidSpec).
GroundTruth derive_ground_truth(const Scenario& spec);

// Writes traces.parquet, metrics.parquet, logs.parquet and
// ground_truth.json under out_dir. Byte-deterministic for a fixed spec:
// the same seed always produces identical files. Throws Error(InvalidSpec)
// on bad specs and Error(FileNotReadable) when out_dir cannot be created.
GeneratedScenario generate_scenario(const Scenario& spec, const std::string& out_dir);

// JSON round-trip for scenario specs ({seed, span, faults[, topology]};
// topology defaults to standard()). Throws Error(InvalidSpec) on malformed
// input.
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& spec);

// Deterministic evaluation corpus: `count` scenarios cycling targets over
// the storefront services, alternating service- and pod-level faults, with
// a seeded-shuffled kind mix of 40% error_status, 20% rrt_spike, 15%
// pod_crash, 12% cpu_stress, 8% req_resp_mismatch and 5% log_burst.
std::vector<Scenario> standard_corpus(uint64_t seed, int64_t start_s,
                                      size_t count = 100);

}  // namespace orca

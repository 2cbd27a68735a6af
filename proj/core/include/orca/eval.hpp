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

#include "orca/fixtures.hpp"
#include "orca/pipeline.hpp"

namespace orca {

struct CaseSpec {
  std::string case_id;
  // Either explicit dataset paths or an inline scenario to generate on
  // demand (materialized under <manifest dir>/generated/<case_id>).
  DatasetPaths paths;
  std::optional<Scenario> scenario;
  TimeWindow window;
  ComponentId truth;
  std::string truth_description;
};

struct CaseManifest {
  std::vector<CaseSpec> cases;
  // Directory the manifest was loaded from; relative case paths resolve
  // against it.
  std::string base_dir;
};

// Parses {"cases": [{case_id, window, ground_truth, traces/metrics/logs or
// scenario}]}. Relative paths are kept relative; load_case_manifest resolves
// them against the manifest's directory. Throws Error(ManifestError) on
// duplicate or missing case ids and malformed entries.
CaseManifest manifest_from_json(const std::string& text);
CaseManifest load_case_manifest(const std::string& path);

struct CaseResult {
  std::string case_id;
  std::string predicted;  // empty when the case failed before a diagnosis
  ComponentId truth;
  bool correct = false;
  int steps = 0;
  std::optional<Diagnosis> diagnosis;
  std::optional<std::string> error;  // one-line failure summary with the code
};

struct EvalResult {
  double accuracy = 0.0;   // correct / total cases; failures count as wrong
  double avg_steps = 0.0;  // over cases that produced a Diagnosis
  std::vector<CaseResult> per_case;
};

// True when a predicted component identifier names the ground-truth
// component, treating a pod prediction as matching a service truth when the
// pod's derived service agrees.
bool prediction_matches(const std::string& predicted, const ComponentId& truth);

// Runs every case through the pipeline. Cases execute concurrently up to
// config.parallelism; results keep manifest order. Throws
// Error(ManifestError) when a case cannot be resolved.
EvalResult run_eval(const CaseManifest& manifest, const PipelineConfig& config);

std::string eval_result_to_json(const EvalResult& result);

// Human-readable per-case report: question, truth, prediction and the
// step/action/observation table, or an error section for failed cases.
std::string render_case_report(const CaseResult& result);

}  // namespace orca

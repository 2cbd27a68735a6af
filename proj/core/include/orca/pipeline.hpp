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

#include "orca/ingest.hpp"
#include "orca/log_analysis.hpp"
#include "orca/metric_analysis.hpp"
#include "orca/reasoner.hpp"

namespace orca {

struct PipelineConfig {
  DetectorConfig detector;
  KeywordConfig keywords;
  FusionConfig fusion;
  BackendConfig backend;
  int parallelism = 1;
  std::string log_level = "info";  // error | warn | info | debug

  void validate() const;
};

// Parses a JSON config ({detector, keywords, fusion, backend, parallelism,
// log_level}, every section optional). Unknown keys and an "api_key" field
// are rejected: credentials live in the environment variable named by
// backend.api_key_env, never in config files. Throws Error(InvalidConfig).
PipelineConfig pipeline_config_from_json(const std::string& text);
PipelineConfig load_pipeline_config(const std::string& path);

std::string pipeline_config_to_json(const PipelineConfig& config);

// Scans a scenario directory for parquet files by stem: names containing
// "trace", "metric" or "log" are assigned to that modality, sorted. Missing
// modalities yield empty lists.
DatasetPaths discover_dataset(const std::string& dir);

struct CaseOutcome {
  Diagnosis diagnosis;
  // The serialized evidence context handed to the reasoner.
  std::string context_json;
  std::vector<std::string> warnings;
};

// ingest -> preprocess -> per-modality analysis -> fusion -> reasoning.
// Throws module errors unchanged (NoEvidence, SchemaMismatch, ...).
CaseOutcome run_case(const DatasetPaths& paths, const TimeWindow& window,
                     const PipelineConfig& config);

std::string diagnosis_to_json(const Diagnosis& diagnosis);

}  // namespace orca

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

#include "orca/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "orca/preprocess.hpp"
#include "orca/trace_analysis.hpp"

namespace orca {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& section, const std::string& name,
                         const std::set<std::string>& known) {
  for (const auto& [key, value] : section.items()) {
    (void)value;
    if (known.count(key) == 0) {
      throw Error(ErrorCode::InvalidConfig,
                  "unknown key '" + key + "' in config section '" + name + "'");
    }
  }
}

void parse_detector(const json& section, DetectorConfig& out) {
  reject_unknown_keys(section, "detector",
                      {"z_threshold", "trend_slope_threshold",
                       "mismatch_ratio_threshold", "pelt_penalty_multiplier",
                       "min_segment_length", "z_threshold_by_metric",
                       "trend_threshold_by_metric"});
  out.z_threshold = section.value("z_threshold", out.z_threshold);
  out.trend_slope_threshold =
      section.value("trend_slope_threshold", out.trend_slope_threshold);
  out.mismatch_ratio_threshold =
      section.value("mismatch_ratio_threshold", out.mismatch_ratio_threshold);
  out.pelt_penalty_multiplier =
      section.value("pelt_penalty_multiplier", out.pelt_penalty_multiplier);
  out.min_segment_length = section.value("min_segment_length", out.min_segment_length);
  if (section.contains("z_threshold_by_metric")) {
    for (const auto& [metric, value] : section["z_threshold_by_metric"].items()) {
      out.z_threshold_by_metric[metric] = value.get<double>();
    }
  }
  if (section.contains("trend_threshold_by_metric")) {
    for (const auto& [metric, value] : section["trend_threshold_by_metric"].items()) {
      out.trend_threshold_by_metric[metric] = value.get<double>();
    }
  }
}

void parse_keywords(const json& section, KeywordConfig& out) {
  reject_unknown_keys(section, "keywords",
                      {"keywords", "status_codes", "max_entries_per_component"});
  if (section.contains("keywords")) {
    out.keywords = section["keywords"].get<std::vector<std::string>>();
  }
  if (section.contains("status_codes")) {
    out.status_codes = section["status_codes"].get<std::vector<int>>();
  }
  out.max_entries_per_component =
      section.value("max_entries_per_component", out.max_entries_per_component);
}

void parse_fusion(const json& section, FusionConfig& out) {
  reject_unknown_keys(section, "fusion",
                      {"weight_trace", "weight_metric", "weight_log", "top_k",
                       "max_context_chars", "strategy"});
  out.weight_trace = section.value("weight_trace", out.weight_trace);
  out.weight_metric = section.value("weight_metric", out.weight_metric);
  out.weight_log = section.value("weight_log", out.weight_log);
  out.top_k = section.value("top_k", out.top_k);
  out.max_context_chars = section.value("max_context_chars", out.max_context_chars);
  if (section.contains("strategy")) {
    out.strategy = fusion_strategy_from_name(section["strategy"].get<std::string>());
  }
}

void parse_backend(const json& section, BackendConfig& out) {
  if (section.contains("api_key")) {
    throw Error(ErrorCode::InvalidConfig,
                "config files must not carry credentials; export the key in "
                "the environment variable named by backend.api_key_env");
  }
  reject_unknown_keys(section, "backend",
                      {"kind", "endpoint", "model_name", "temperature",
                       "max_retries", "timeout_s", "api_key_env"});
  if (section.contains("kind")) {
    out.kind = backend_kind_from_name(section["kind"].get<std::string>());
  }
  out.endpoint = section.value("endpoint", out.endpoint);
  out.model_name = section.value("model_name", out.model_name);
  out.temperature = section.value("temperature", out.temperature);
  out.max_retries = section.value("max_retries", out.max_retries);
  out.timeout_s = section.value("timeout_s", out.timeout_s);
  out.api_key_env = section.value("api_key_env", out.api_key_env);
}

}  // namespace

void PipelineConfig::validate() const {
  detector.validate();
  keywords.validate();
  fusion.validate();
  backend.validate();
  if (parallelism < 1) {
    throw Error(ErrorCode::InvalidConfig, "parallelism must be >= 1");
  }
  static const std::set<std::string> kLevels = {"error", "warn", "info", "debug"};
  if (kLevels.count(log_level) == 0) {
    throw Error(ErrorCode::InvalidConfig, "unknown log level: " + log_level);
  }
}

PipelineConfig pipeline_config_from_json(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidConfig, "config is not a JSON object");
  }
  reject_unknown_keys(doc, "(top level)",
                      {"detector", "keywords", "fusion", "backend",
                       "parallelism", "log_level"});
  PipelineConfig config;
  try {
    if (doc.contains("detector")) parse_detector(doc["detector"], config.detector);
    if (doc.contains("keywords")) parse_keywords(doc["keywords"], config.keywords);
    if (doc.contains("fusion")) parse_fusion(doc["fusion"], config.fusion);
    if (doc.contains("backend")) parse_backend(doc["backend"], config.backend);
    config.parallelism = doc.value("parallelism", config.parallelism);
    config.log_level = doc.value("log_level", config.log_level);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed config: ") + e.what());
  }
  config.validate();
  return config;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotReadable, "cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return pipeline_config_from_json(buffer.str());
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
  json doc;
  doc["detector"] = {
      {"min_segment_length", config.detector.min_segment_length},
      {"mismatch_ratio_threshold", config.detector.mismatch_ratio_threshold},
      {"pelt_penalty_multiplier", config.detector.pelt_penalty_multiplier},
      {"trend_slope_threshold", config.detector.trend_slope_threshold},
      {"z_threshold", config.detector.z_threshold}};
  if (!config.detector.z_threshold_by_metric.empty()) {
    doc["detector"]["z_threshold_by_metric"] = config.detector.z_threshold_by_metric;
  }
  if (!config.detector.trend_threshold_by_metric.empty()) {
    doc["detector"]["trend_threshold_by_metric"] =
        config.detector.trend_threshold_by_metric;
  }
  doc["keywords"] = {
      {"keywords", config.keywords.keywords},
      {"max_entries_per_component", config.keywords.max_entries_per_component},
      {"status_codes", config.keywords.status_codes}};
  doc["fusion"] = {{"max_context_chars", config.fusion.max_context_chars},
                   {"strategy", std::string(fusion_strategy_name(config.fusion.strategy))},
                   {"top_k", config.fusion.top_k},
                   {"weight_log", config.fusion.weight_log},
                   {"weight_metric", config.fusion.weight_metric},
                   {"weight_trace", config.fusion.weight_trace}};
  doc["backend"] = {{"api_key_env", config.backend.api_key_env},
                    {"endpoint", config.backend.endpoint},
                    {"kind", std::string(backend_kind_name(config.backend.kind))},
                    {"max_retries", config.backend.max_retries},
                    {"model_name", config.backend.model_name},
                    {"temperature", config.backend.temperature},
                    {"timeout_s", config.backend.timeout_s}};
  doc["log_level"] = config.log_level;
  doc["parallelism"] = config.parallelism;
  return doc.dump(2) + "\n";
}

DatasetPaths discover_dataset(const std::string& dir) {
  DatasetPaths paths;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) {
    throw Error(ErrorCode::FileNotReadable,
                "cannot list dataset directory '" + dir + "': " + ec.message());
  }
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() != ".parquet") continue;
    if (name.find("trace") != std::string::npos) {
      paths.trace_paths.push_back(entry.path().string());
    } else if (name.find("metric") != std::string::npos) {
      paths.metric_paths.push_back(entry.path().string());
    } else if (name.find("log") != std::string::npos) {
      paths.log_paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.trace_paths.begin(), paths.trace_paths.end());
  std::sort(paths.metric_paths.begin(), paths.metric_paths.end());
  std::sort(paths.log_paths.begin(), paths.log_paths.end());
  return paths;
}

CaseOutcome run_case(const DatasetPaths& paths, const TimeWindow& window,
                     const PipelineConfig& config) {
  config.validate();

  const TelemetryDataset dataset = load_dataset(paths, window);
  const PreprocessedDataset pre = preprocess(dataset);

  const std::vector<CallTree> forest = build_call_trees(pre.trace_groups);
  const TraceAnomalyReport traces = detect_trace_anomalies(forest);
  const MetricAnomalyReport metrics = analyze_metrics(pre, config.detector);
  const LogAnomalyReport logs = filter_logs(pre.log_groups, config.keywords);

  const EvidenceContext context =
      apply_strategy(pre, traces, metrics, logs, config.fusion);

  CaseOutcome outcome;
  outcome.context_json = serialize_context(context, config.fusion);
  outcome.diagnosis = diagnose(context, config.fusion, config.backend);
  // pre.warnings already carries the ingest warnings forward.
  outcome.warnings = pre.warnings;
  outcome.warnings.insert(outcome.warnings.end(), traces.warnings.begin(),
                          traces.warnings.end());
  outcome.warnings.insert(outcome.warnings.end(), metrics.warnings.begin(),
                          metrics.warnings.end());
  return outcome;
}

std::string diagnosis_to_json(const Diagnosis& diagnosis) {
  json doc;
  doc["component"] = diagnosis.component;
  doc["reason"] = diagnosis.reason;
  json steps = json::array();
  for (const ReasoningStep& step : diagnosis.reasoning_trace) {
    steps.push_back({{"action", step.action},
                     {"observation", step.observation},
                     {"step", step.step}});
  }
  doc["reasoning_trace"] = std::move(steps);
  return doc.dump();
}

}  // namespace orca

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

#include "orca/eval.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace orca {

namespace {

using nlohmann::json;

ComponentLevel level_from_name(const std::string& name) {
  if (name == "service") return ComponentLevel::Service;
  if (name == "pod") return ComponentLevel::Pod;
  if (name == "node") return ComponentLevel::Node;
  throw Error(ErrorCode::ManifestError, "unknown component level: " + name);
}

std::vector<std::string> path_list(const json& entry, const char* key) {
  if (!entry.contains(key)) return {};
  return entry[key].get<std::vector<std::string>>();
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path[0] == '/' || base_dir.empty()) return path;
  return base_dir + "/" + path;
}

// Materializes scenario-backed cases and resolves relative paths.
DatasetPaths resolve_case_paths(const CaseSpec& spec, const std::string& base_dir) {
  if (spec.scenario) {
    const std::string dir =
        (base_dir.empty() ? std::string(".") : base_dir) + "/generated/" + spec.case_id;
    if (!std::filesystem::exists(dir + "/traces.parquet")) {
      generate_scenario(*spec.scenario, dir);
    }
    return discover_dataset(dir);
  }
  DatasetPaths paths;
  for (const std::string& p : spec.paths.trace_paths)
    paths.trace_paths.push_back(resolve_path(base_dir, p));
  for (const std::string& p : spec.paths.metric_paths)
    paths.metric_paths.push_back(resolve_path(base_dir, p));
  for (const std::string& p : spec.paths.log_paths)
    paths.log_paths.push_back(resolve_path(base_dir, p));
  return paths;
}

CaseResult run_single_case(const CaseSpec& spec, const std::string& base_dir,
                           const PipelineConfig& config) {
  CaseResult result;
  result.case_id = spec.case_id;
  result.truth = spec.truth;
  try {
    const DatasetPaths paths = resolve_case_paths(spec, base_dir);
    CaseOutcome outcome = run_case(paths, spec.window, config);
    result.predicted = outcome.diagnosis.component;
    result.steps = static_cast<int>(outcome.diagnosis.reasoning_trace.size());
    result.correct = prediction_matches(result.predicted, spec.truth);
    result.diagnosis = std::move(outcome.diagnosis);
  } catch (const Error& e) {
    result.error = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.error = std::string("Internal: ") + e.what();
  }
  return result;
}

}  // namespace

CaseManifest manifest_from_json(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("cases") ||
      !doc["cases"].is_array()) {
    throw Error(ErrorCode::ManifestError,
                "manifest must be a JSON object with a 'cases' array");
  }

  CaseManifest manifest;
  std::set<std::string> seen;
  try {
    for (const json& entry : doc["cases"]) {
      CaseSpec spec;
      spec.case_id = entry.at("case_id").get<std::string>();
      if (spec.case_id.empty()) {
        throw Error(ErrorCode::ManifestError, "empty case_id");
      }
      if (!seen.insert(spec.case_id).second) {
        throw Error(ErrorCode::ManifestError, "duplicate case_id: " + spec.case_id);
      }
      spec.window = TimeWindow{entry.at("window").at("start").get<int64_t>(),
                               entry.at("window").at("end").get<int64_t>()};
      const json& truth = entry.at("ground_truth");
      spec.truth.name = truth.at("component").get<std::string>();
      spec.truth.level = level_from_name(truth.value("level", "service"));
      spec.truth_description = truth.value("description", "");

      if (entry.contains("scenario")) {
        spec.scenario = scenario_from_json(entry["scenario"].dump());
      } else {
        spec.paths.trace_paths = path_list(entry, "traces");
        spec.paths.metric_paths = path_list(entry, "metrics");
        spec.paths.log_paths = path_list(entry, "logs");
        if (spec.paths.empty()) {
          throw Error(ErrorCode::ManifestError,
                      "case '" + spec.case_id +
                          "' names no dataset files and no scenario");
        }
      }
      manifest.cases.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ManifestError,
                std::string("malformed manifest: ") + e.what());
  }
  return manifest;
}

CaseManifest load_case_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileNotReadable, "cannot open manifest: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  CaseManifest manifest = manifest_from_json(buffer.str());
  manifest.base_dir = std::filesystem::path(path).parent_path().string();
  return manifest;
}

bool prediction_matches(const std::string& predicted, const ComponentId& truth) {
  if (predicted.empty()) return false;
  if (predicted == truth.name) return true;
  if (truth.level == ComponentLevel::Service) {
    return service_of_pod(predicted) == truth.name;
  }
  return false;
}

EvalResult run_eval(const CaseManifest& manifest, const PipelineConfig& config) {
  config.validate();

  EvalResult result;
  result.per_case.resize(manifest.cases.size());

  const size_t workers = std::min<size_t>(
      static_cast<size_t>(config.parallelism),
      manifest.cases.size() == 0 ? 1 : manifest.cases.size());
  std::atomic<size_t> next{0};
  const auto worker = [&] {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= manifest.cases.size()) return;
      result.per_case[index] =
          run_single_case(manifest.cases[index], manifest.base_dir, config);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  size_t correct = 0, diagnosed = 0, total_steps = 0;
  for (const CaseResult& r : result.per_case) {
    if (r.correct) ++correct;
    if (r.diagnosis) {
      ++diagnosed;
      total_steps += static_cast<size_t>(r.steps);
    }
  }
  result.accuracy = result.per_case.empty()
                        ? 0.0
                        : static_cast<double>(correct) /
                              static_cast<double>(result.per_case.size());
  result.avg_steps = diagnosed == 0 ? 0.0
                                    : static_cast<double>(total_steps) /
                                          static_cast<double>(diagnosed);
  return result;
}

std::string eval_result_to_json(const EvalResult& result) {
  json doc;
  doc["accuracy"] = result.accuracy;
  doc["avg_steps"] = result.avg_steps;
  json cases = json::array();
  for (const CaseResult& r : result.per_case) {
    json entry;
    entry["case_id"] = r.case_id;
    entry["correct"] = r.correct;
    entry["predicted"] = r.predicted;
    entry["steps"] = r.steps;
    entry["truth"] = {{"component", r.truth.name},
                      {"level", std::string(component_level_name(r.truth.level))}};
    if (r.error) entry["error"] = *r.error;
    cases.push_back(std::move(entry));
  }
  doc["per_case"] = std::move(cases);
  return doc.dump();
}

std::string render_case_report(const CaseResult& result) {
  std::ostringstream out;
  out << "Case: " << result.case_id << "\n";
  out << "Question: which component is the root cause of the failures in "
         "this fault window?\n";
  out << "Ground truth: " << result.truth.name << " ("
      << component_level_name(result.truth.level) << ")\n";

  if (result.error) {
    out << "Outcome: FAILED\n";
    out << "Error: " << *result.error << "\n";
    return out.str();
  }

  out << "Prediction: " << result.predicted << " ("
      << (result.correct ? "correct" : "incorrect") << ")\n";
  if (result.diagnosis) {
    out << "Reason: " << result.diagnosis->reason << "\n";
    out << "Steps:\n";
    for (const ReasoningStep& step : result.diagnosis->reasoning_trace) {
      out << "  " << step.step << ". " << step.action << "\n";
      out << "     " << step.observation << "\n";
    }
  }
  return out.str();
}

}  // namespace orca

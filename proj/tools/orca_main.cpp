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
//
// orca: root cause analysis over traces, metrics and logs.
//
// Subcommands:
//   diagnose  run the full pipeline on one fault window, print a Diagnosis
//   analyze   run the per-modality analyzers only, print their reports
//   generate  materialize synthetic fault scenarios (single spec or corpus)
//   eval      score a case manifest and report accuracy / avg steps
//
// stdout carries machine-readable JSON only; diagnostics go to stderr. On
// failure a one-line error JSON lands on stderr and the exit code is the
// error's class.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/eval.hpp"
#include "orca/fixtures.hpp"
#include "orca/pipeline.hpp"
#include "orca/preprocess.hpp"
#include "orca/trace_analysis.hpp"

namespace {

using nlohmann::json;

int g_log_verbosity = 2;  // error=0 warn=1 info=2 debug=3

int verbosity_of(const std::string& level) {
  if (level == "error") return 0;
  if (level == "warn") return 1;
  if (level == "info") return 2;
  if (level == "debug") return 3;
  throw orca::Error(orca::ErrorCode::InvalidConfig, "unknown log level: " + level);
}

void log_line(int verbosity, const char* tag, const std::string& message) {
  if (verbosity > g_log_verbosity) return;
  std::fprintf(stderr, "[%s] %s\n", tag, message.c_str());
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) log_line(1, "warn", w);
}

struct CommonOptions {
  std::string config_path;
  std::string log_level;
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "pipeline config JSON file");
  cmd->add_option("--log-level", opts.log_level,
                  "stderr verbosity: error, warn, info or debug");
  cmd->add_option("--seed", opts.seed, "seed override for generated data")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

orca::PipelineConfig make_config(const CommonOptions& opts) {
  orca::PipelineConfig config;
  if (!opts.config_path.empty()) {
    config = orca::load_pipeline_config(opts.config_path);
  }
  if (!opts.log_level.empty()) config.log_level = opts.log_level;
  config.validate();
  g_log_verbosity = verbosity_of(config.log_level);
  return config;
}

orca::TimeWindow parse_window(int64_t start, int64_t end) {
  return orca::TimeWindow{start, end};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw orca::Error(orca::ErrorCode::FileNotReadable,
                      "cannot write file: " + path);
  }
  out << text;
}

// ----- diagnose -----------------------------------------------------------

struct DiagnoseArgs {
  CommonOptions common;
  std::vector<std::string> traces, metrics, logs;
  std::string data_dir;
  int64_t window_start = 0, window_end = 0;
  std::string strategy;
  std::string dump_context_path;
};

int cmd_diagnose(const DiagnoseArgs& args) {
  orca::PipelineConfig config = make_config(args.common);
  if (!args.strategy.empty()) {
    config.fusion.strategy = orca::fusion_strategy_from_name(args.strategy);
  }

  orca::DatasetPaths paths;
  if (!args.data_dir.empty()) {
    paths = orca::discover_dataset(args.data_dir);
  }
  paths.trace_paths.insert(paths.trace_paths.end(), args.traces.begin(),
                           args.traces.end());
  paths.metric_paths.insert(paths.metric_paths.end(), args.metrics.begin(),
                            args.metrics.end());
  paths.log_paths.insert(paths.log_paths.end(), args.logs.begin(), args.logs.end());

  const orca::TimeWindow window = parse_window(args.window_start, args.window_end);
  log_line(2, "info", "diagnosing window " + orca::format_utc_s(window.start_s) +
                          " .. " + orca::format_utc_s(window.end_s));

  orca::CaseOutcome outcome = orca::run_case(paths, window, config);
  log_warnings(outcome.warnings);
  if (!args.dump_context_path.empty()) {
    write_text_file(args.dump_context_path, outcome.context_json);
    log_line(2, "info", "evidence context written to " + args.dump_context_path);
  }
  std::fputs((orca::diagnosis_to_json(outcome.diagnosis) + "\n").c_str(), stdout);
  return 0;
}

// ----- analyze ------------------------------------------------------------

struct AnalyzeArgs {
  CommonOptions common;
  std::vector<std::string> traces, metrics, logs;
  std::string data_dir;
  int64_t window_start = 0, window_end = 0;
};

int cmd_analyze(const AnalyzeArgs& args) {
  const orca::PipelineConfig config = make_config(args.common);

  orca::DatasetPaths paths;
  if (!args.data_dir.empty()) paths = orca::discover_dataset(args.data_dir);
  paths.trace_paths.insert(paths.trace_paths.end(), args.traces.begin(),
                           args.traces.end());
  paths.metric_paths.insert(paths.metric_paths.end(), args.metrics.begin(),
                            args.metrics.end());
  paths.log_paths.insert(paths.log_paths.end(), args.logs.begin(), args.logs.end());

  const orca::TimeWindow window = parse_window(args.window_start, args.window_end);
  const orca::TelemetryDataset dataset = orca::load_dataset(paths, window);
  const orca::PreprocessedDataset pre = orca::preprocess(dataset);
  log_warnings(pre.warnings);

  const auto forest = orca::build_call_trees(pre.trace_groups);
  const orca::TraceAnomalyReport traces = orca::detect_trace_anomalies(forest);
  const orca::MetricAnomalyReport metrics = orca::analyze_metrics(pre, config.detector);
  const orca::LogAnomalyReport logs = orca::filter_logs(pre.log_groups, config.keywords);
  log_warnings(traces.warnings);
  log_warnings(metrics.warnings);

  json doc;
  json trace_section;
  json candidates = json::array();
  for (const orca::ComponentId& c : traces.candidate_components) {
    int count = 0;
    if (auto it = traces.candidate_error_counts.find(c.name);
        it != traces.candidate_error_counts.end()) {
      count = it->second;
    }
    candidates.push_back({{"component", c.name},
                          {"error_count", count},
                          {"level", std::string(orca::component_level_name(c.level))}});
  }
  trace_section["candidates"] = std::move(candidates);
  trace_section["propagation_paths"] = traces.propagation_paths;
  doc["traces"] = std::move(trace_section);

  json metric_section = json::array();
  for (const orca::MetricAnomaly& a : metrics.anomalies) {
    metric_section.push_back(
        {{"component", a.component.name},
         {"detail", a.detail},
         {"kind", std::string(orca::anomaly_kind_name(a.kind))},
         {"metric", a.metric_name},
         {"severity", a.severity},
         {"time", orca::format_utc_us(a.timestamp_us)}});
  }
  doc["metrics"] = std::move(metric_section);

  json log_section = json::array();
  for (const auto& [component, count] : logs.per_component_count) {
    size_t shown = 0;
    if (auto it = logs.entries.find(component); it != logs.entries.end()) {
      shown = it->second.size();
    }
    log_section.push_back({{"component", component.name},
                           {"match_count", count},
                           {"shown", shown}});
  }
  doc["logs"] = std::move(log_section);

  std::fputs((doc.dump() + "\n").c_str(), stdout);
  return 0;
}

// ----- generate -------------------------------------------------------------

struct GenerateArgs {
  CommonOptions common;
  std::string spec_path;
  std::string out_dir;
  size_t corpus_count = 0;
  int64_t corpus_start_s = 1700000000;
};

int cmd_generate(const GenerateArgs& args) {
  make_config(args.common);

  if (args.corpus_count > 0) {
    const uint64_t seed = args.common.seed_set ? args.common.seed : 42;
    const auto corpus =
        orca::standard_corpus(seed, args.corpus_start_s, args.corpus_count);
    json manifest;
    manifest["cases"] = json::array();
    for (size_t i = 0; i < corpus.size(); ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "case-%03zu", i);
      const orca::GeneratedScenario generated =
          orca::generate_scenario(corpus[i], args.out_dir + "/" + name);
      const orca::GroundTruth& truth = generated.truth;
      json entry;
      entry["case_id"] = name;
      entry["traces"] = {std::string(name) + "/traces.parquet"};
      entry["metrics"] = {std::string(name) + "/metrics.parquet"};
      entry["logs"] = {std::string(name) + "/logs.parquet"};
      entry["window"] = {{"end", truth.case_window.end_s},
                         {"start", truth.case_window.start_s}};
      entry["ground_truth"] = {
          {"component", truth.component.name},
          {"description",
           truth.fault_descriptions.empty() ? "" : truth.fault_descriptions[0]},
          {"level", std::string(orca::component_level_name(truth.component.level))}};
      manifest["cases"].push_back(std::move(entry));
      log_line(3, "debug", std::string("generated ") + name + " -> " +
                               truth.component.name);
    }
    write_text_file(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    json summary;
    summary["cases"] = corpus.size();
    summary["manifest"] = args.out_dir + "/manifest.json";
    std::fputs((summary.dump() + "\n").c_str(), stdout);
    return 0;
  }

  std::ifstream in(args.spec_path, std::ios::binary);
  if (!in) {
    throw orca::Error(orca::ErrorCode::FileNotReadable,
                      "cannot open scenario spec: " + args.spec_path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  orca::Scenario spec = orca::scenario_from_json(buffer.str());
  if (args.common.seed_set) spec.seed = args.common.seed;

  const orca::GeneratedScenario generated =
      orca::generate_scenario(spec, args.out_dir);
  json summary;
  summary["directory"] = generated.directory;
  summary["ground_truth"] = generated.truth.component.name;
  summary["files"] = {generated.trace_path, generated.metric_path,
                      generated.log_path, generated.truth_path};
  std::fputs((summary.dump() + "\n").c_str(), stdout);
  return 0;
}

// ----- eval -----------------------------------------------------------------

struct EvalArgs {
  CommonOptions common;
  std::string manifest_path;
  std::string strategy;
  double min_accuracy = -1.0;
  std::string report_dir;
};

int cmd_eval(const EvalArgs& args) {
  orca::PipelineConfig config = make_config(args.common);
  if (!args.strategy.empty()) {
    config.fusion.strategy = orca::fusion_strategy_from_name(args.strategy);
  }

  const orca::CaseManifest manifest = orca::load_case_manifest(args.manifest_path);
  log_line(2, "info", "running " + std::to_string(manifest.cases.size()) +
                          " cases (strategy=" +
                          std::string(orca::fusion_strategy_name(config.fusion.strategy)) +
                          ", parallelism=" + std::to_string(config.parallelism) + ")");

  const orca::EvalResult result = orca::run_eval(manifest, config);
  if (!args.report_dir.empty()) {
    std::filesystem::create_directories(args.report_dir);
    for (const orca::CaseResult& r : result.per_case) {
      write_text_file(args.report_dir + "/" + r.case_id + ".txt",
                      orca::render_case_report(r));
    }
  }
  std::fputs((orca::eval_result_to_json(result) + "\n").c_str(), stdout);

  if (args.min_accuracy >= 0.0 && result.accuracy < args.min_accuracy) {
    char msg[96];
    std::snprintf(msg, sizeof(msg), "accuracy %.4f below required %.4f",
                  result.accuracy, args.min_accuracy);
    throw orca::Error(orca::ErrorCode::MinAccuracyFailed, msg);
  }
  return 0;
}

int report_error(const orca::Error& e) {
  json err;
  err["code"] = std::string(orca::error_code_name(e.code()));
  err["error"] = e.what();
  err["exit"] = orca::exit_code(e.code());
  std::fputs((err.dump() + "\n").c_str(), stderr);
  return orca::exit_code(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"root cause analysis over traces, metrics and logs"};
  app.require_subcommand(1);

  DiagnoseArgs diagnose_args;
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "run the full pipeline on one fault window");
  add_common_options(diagnose, diagnose_args.common);
  diagnose->add_option("--traces", diagnose_args.traces, "trace parquet files");
  diagnose->add_option("--metrics", diagnose_args.metrics, "metric parquet files");
  diagnose->add_option("--logs", diagnose_args.logs, "log parquet files");
  diagnose->add_option("--data-dir", diagnose_args.data_dir,
                       "directory scanned for trace/metric/log parquet files");
  diagnose->add_option("--window-start", diagnose_args.window_start,
                       "fault window start (unix seconds)")->required();
  diagnose->add_option("--window-end", diagnose_args.window_end,
                       "fault window end (unix seconds, exclusive)")->required();
  diagnose->add_option("--strategy", diagnose_args.strategy,
                       "fusion strategy: original, early, intermediate or final");
  diagnose->add_option("--dump-context", diagnose_args.dump_context_path,
                       "also write the serialized evidence context to this file");

  AnalyzeArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "run the per-modality analyzers and print their reports");
  add_common_options(analyze, analyze_args.common);
  analyze->add_option("--traces", analyze_args.traces, "trace parquet files");
  analyze->add_option("--metrics", analyze_args.metrics, "metric parquet files");
  analyze->add_option("--logs", analyze_args.logs, "log parquet files");
  analyze->add_option("--data-dir", analyze_args.data_dir,
                      "directory scanned for trace/metric/log parquet files");
  analyze->add_option("--window-start", analyze_args.window_start,
                      "window start (unix seconds)")->required();
  analyze->add_option("--window-end", analyze_args.window_end,
                      "window end (unix seconds, exclusive)")->required();

  GenerateArgs generate_args;
  CLI::App* generate = app.add_subcommand(
      "generate", "materialize synthetic fault scenarios");
  add_common_options(generate, generate_args.common);
  generate->add_option("--spec", generate_args.spec_path,
                       "scenario spec JSON (single scenario)");
  generate->add_option("--out", generate_args.out_dir, "output directory")
      ->required();
  generate->add_option("--corpus", generate_args.corpus_count,
                       "generate an N-case corpus with a manifest instead");
  generate->add_option("--corpus-start", generate_args.corpus_start_s,
                       "unix-seconds start of the first corpus scenario");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand(
      "eval", "score a case manifest and report accuracy / avg steps");
  add_common_options(eval, eval_args.common);
  eval->add_option("--manifest", eval_args.manifest_path, "case manifest JSON")
      ->required();
  eval->add_option("--strategy", eval_args.strategy,
                   "fusion strategy override for every case");
  eval->add_option("--min-accuracy", eval_args.min_accuracy,
                   "exit non-zero when accuracy falls below this fraction");
  eval->add_option("--report-dir", eval_args.report_dir,
                   "write one human-readable report per case into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (diagnose->parsed()) return cmd_diagnose(diagnose_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (generate->parsed()) return cmd_generate(generate_args);
    if (eval->parsed()) return cmd_eval(eval_args);
  } catch (const orca::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    return report_error(orca::Error(orca::ErrorCode::Internal, e.what()));
  }
  return 0;
}

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

#include "orca/fusion.hpp"

#include <doctest.h>
#include <json.hpp>

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "orca/errors.hpp"

namespace orca {
namespace {

constexpr int64_t kStartS = 1700000000;
constexpr int64_t kStartUs = kStartS * kMicrosPerSecond;

TimeWindow window() { return TimeWindow{kStartS, kStartS + 900}; }

ComponentId pod(const std::string& name) {
  return ComponentId{name, ComponentLevel::Pod};
}

TraceAnomalyReport trace_report() {
  TraceAnomalyReport report;
  report.anomalous_leaves.push_back(AnomalousLeaf{pod("cartservice-0"), 2, 9});
  report.propagation_paths = {{"frontend-0", "cartservice-0"}};
  report.candidate_components = {pod("cartservice-0")};
  report.candidate_error_counts = {{"cartservice-0", 9}};
  return report;
}

MetricAnomalyReport metric_report() {
  MetricAnomalyReport report;
  report.anomalies.push_back(MetricAnomaly{
      pod("cartservice-0"), "rrt", AnomalyKind::Threshold, kStartUs + 60'000'000,
      12.0, "z-score 12.0"});
  report.anomalies.push_back(MetricAnomaly{
      pod("paymentservice-1"), "cpu_usage", AnomalyKind::Trend,
      kStartUs + 120'000'000, 2.5, "slope 7.5 units/min"});
  for (const auto& a : report.anomalies)
    report.per_component_score[a.component] += a.severity;
  return report;
}

LogAnomalyReport log_report() {
  LogAnomalyReport report;
  report.truncation_limit = 50;
  report.entries[pod("cartservice-0")] = {
      {kStartUs + 30'000'000, "error", "connection error to redis-cart"}};
  report.per_component_count[pod("cartservice-0")] = 40;
  report.entries[pod("currencyservice-2")] = {
      {kStartUs + 45'000'000, "timeout", "timeout waiting for upstream"}};
  report.per_component_count[pod("currencyservice-2")] = 3;
  return report;
}

PreprocessedDataset tiny_dataset() {
  PreprocessedDataset pre;
  pre.case_window = window();
  SpanRecord span;
  span.trace_id = "t1";
  span.span_id = "a";
  span.service = "frontend";
  span.pod = "frontend-0";
  span.start_time = kStartUs + 1'000'000;
  span.duration_us = 1000;
  span.status_code = 0;
  pre.trace_groups["t1"].push_back(span);
  SpanRecord bad = span;
  bad.span_id = "b";
  bad.parent_span_id = "a";
  bad.service = "cartservice";
  bad.pod = "cartservice-0";
  bad.start_time = kStartUs + 2'000'000;
  bad.status_code = 2;
  pre.trace_groups["t1"].push_back(bad);

  ComponentSeries series;
  series.component = pod("cartservice-0");
  series.metric_name = "rrt";
  series.points = {{kStartUs, 200.0}, {kStartUs + 60'000'000, 97246.0}};
  series.bucket = TimeWindow{kStartS - kStartS % 3600, kStartS - kStartS % 3600 + 3600};
  pre.metric_series.push_back(series);

  pre.log_groups[pod("cartservice-0")].push_back(
      LogRecord{"cartservice-0", kStartUs + 3'000'000, "GetCart failed: error"});
  return pre;
}

const EvidenceBundle* find_bundle(const EvidenceContext& ctx, const std::string& name) {
  for (const auto& b : ctx.bundles) {
    if (b.component.name == name) return &b;
  }
  return nullptr;
}

TEST_CASE("final strategy keeps every modality's findings") {
  FusionConfig cfg;
  EvidenceContext ctx = integrate_evidence(trace_report(), metric_report(),
                                           log_report(), window(), cfg);

  CHECK(ctx.strategy == FusionStrategy::Final);
  CHECK(ctx.has_traces);
  CHECK(ctx.has_metrics);
  CHECK(ctx.has_logs);
  REQUIRE(ctx.bundles.size() == 3);

  const EvidenceBundle* cart = find_bundle(ctx, "cartservice-0");
  REQUIRE(cart != nullptr);
  REQUIRE(cart->trace.has_value());
  CHECK(cart->trace->error_count == 9);
  REQUIRE(cart->trace->paths.size() == 1);
  CHECK(cart->trace->paths[0] ==
        std::vector<std::string>{"frontend-0", "cartservice-0"});
  REQUIRE(cart->metric.has_value());
  CHECK(cart->metric->total_severity == doctest::Approx(12.0));
  REQUIRE(cart->log.has_value());
  CHECK(cart->log->match_count == 40);

  // score = 3*9 + 2*12 + 1*min(40, 50)
  CHECK(cart->score == doctest::Approx(91.0));
  CHECK(ctx.bundles.front().component.name == "cartservice-0");

  const EvidenceBundle* payment = find_bundle(ctx, "paymentservice-1");
  REQUIRE(payment != nullptr);
  CHECK_FALSE(payment->trace.has_value());
  REQUIRE(payment->metric.has_value());
  CHECK(payment->score == doctest::Approx(5.0));

  const EvidenceBundle* currency = find_bundle(ctx, "currencyservice-2");
  REQUIRE(currency != nullptr);
  CHECK_FALSE(currency->trace.has_value());
  CHECK_FALSE(currency->metric.has_value());
  REQUIRE(currency->log.has_value());
  CHECK(currency->score == doctest::Approx(3.0));

  for (size_t i = 1; i < ctx.bundles.size(); ++i) {
    CHECK(ctx.bundles[i - 1].score >= ctx.bundles[i].score);
  }
}

TEST_CASE("intermediate strategy only keeps trace-anchored components") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Intermediate;
  EvidenceContext ctx = apply_strategy(tiny_dataset(), trace_report(),
                                       metric_report(), log_report(), cfg);

  REQUIRE(ctx.bundles.size() == 1);
  CHECK(ctx.bundles[0].component.name == "cartservice-0");
  // Metric and log evidence for the anchored component still attach.
  CHECK(ctx.bundles[0].metric.has_value());
  CHECK(ctx.bundles[0].log.has_value());
  CHECK(find_bundle(ctx, "paymentservice-1") == nullptr);
  CHECK(find_bundle(ctx, "currencyservice-2") == nullptr);
}

TEST_CASE("intermediate strategy fails without trace candidates") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Intermediate;
  TraceAnomalyReport no_traces;
  CHECK_THROWS_WITH_AS(
      apply_strategy(tiny_dataset(), no_traces, metric_report(), log_report(), cfg),
      doctest::Contains("strategy=intermediate"), Error);
}

TEST_CASE("early strategy anchors on metrics and ignores traces") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Early;
  EvidenceContext ctx = apply_strategy(tiny_dataset(), trace_report(),
                                       metric_report(), log_report(), cfg);

  REQUIRE(ctx.bundles.size() == 2);
  const EvidenceBundle* cart = find_bundle(ctx, "cartservice-0");
  REQUIRE(cart != nullptr);
  CHECK_FALSE(cart->trace.has_value());
  CHECK(cart->metric.has_value());
  CHECK(cart->log.has_value());
  // Log-only components do not open bundles here.
  CHECK(find_bundle(ctx, "currencyservice-2") == nullptr);
  CHECK(find_bundle(ctx, "paymentservice-1") != nullptr);
}

TEST_CASE("residual preservation: intermediate anchors survive into final") {
  FusionConfig cfg;
  cfg.top_k = 100;

  cfg.strategy = FusionStrategy::Intermediate;
  EvidenceContext mid = apply_strategy(tiny_dataset(), trace_report(),
                                       metric_report(), log_report(), cfg);
  cfg.strategy = FusionStrategy::Final;
  EvidenceContext fin = apply_strategy(tiny_dataset(), trace_report(),
                                       metric_report(), log_report(), cfg);

  std::set<std::string> final_names;
  for (const auto& b : fin.bundles) final_names.insert(b.component.name);
  for (const auto& b : mid.bundles) {
    CHECK(final_names.count(b.component.name) == 1);
    const EvidenceBundle* in_final = find_bundle(fin, b.component.name);
    REQUIRE(in_final != nullptr);
    REQUIRE(in_final->trace.has_value());
    CHECK(in_final->trace->error_count == b.trace->error_count);
    CHECK(in_final->trace->paths == b.trace->paths);
  }
  CHECK(fin.bundles.size() >= mid.bundles.size());
}

TEST_CASE("original strategy dumps raw records in time order") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Original;
  EvidenceContext ctx = apply_strategy(tiny_dataset(), TraceAnomalyReport{},
                                       MetricAnomalyReport{}, LogAnomalyReport{},
                                       cfg);

  CHECK(ctx.bundles.empty());
  REQUIRE_FALSE(ctx.raw_dump.empty());
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < ctx.raw_dump.size()) {
    const size_t nl = ctx.raw_dump.find('\n', pos);
    lines.push_back(ctx.raw_dump.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 5);  // 2 spans + 2 metric points + 1 log line
  // Time-ordered: the metric point at window start comes first.
  CHECK(lines[0].rfind("metric ", 0) == 0);
  CHECK(lines[1].rfind("span ", 0) == 0);
  // Component is always the third whitespace-separated token.
  for (const auto& line : lines) {
    std::istringstream tokens(line);
    std::string kind, ts, component;
    REQUIRE((tokens >> kind >> ts >> component));
    CHECK((component == "frontend-0" || component == "cartservice-0"));
  }
  CHECK(ctx.raw_dump.find("status=2") != std::string::npos);
  CHECK(ctx.raw_dump.find("rrt=97246") != std::string::npos);
}

TEST_CASE("original strategy on an empty dataset reports no evidence") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Original;
  PreprocessedDataset empty;
  empty.case_window = window();
  CHECK_THROWS_AS(apply_strategy(empty, TraceAnomalyReport{}, MetricAnomalyReport{},
                                 LogAnomalyReport{}, cfg),
                  Error);
  try {
    apply_strategy(empty, TraceAnomalyReport{}, MetricAnomalyReport{},
                   LogAnomalyReport{}, cfg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoEvidence);
  }
}

TEST_CASE("service bundles inherit their pods' log evidence") {
  TraceAnomalyReport traces;
  traces.anomalous_leaves = {AnomalousLeaf{pod("cartservice-0"), 14, 3},
                             AnomalousLeaf{pod("cartservice-1"), 14, 3},
                             AnomalousLeaf{pod("cartservice-2"), 14, 3}};
  traces.candidate_components = {
      ComponentId{"cartservice", ComponentLevel::Service}, pod("cartservice-0"),
      pod("cartservice-1"), pod("cartservice-2")};
  traces.candidate_error_counts = {{"cartservice", 9},
                                   {"cartservice-0", 3},
                                   {"cartservice-1", 3},
                                   {"cartservice-2", 3}};
  traces.propagation_paths = {{"frontend-0", "cartservice"}};

  LogAnomalyReport logs;
  logs.truncation_limit = 50;
  logs.entries[pod("cartservice-0")] = {
      {kStartUs + 2'000'000, "error", "late pod-0 line"}};
  logs.per_component_count[pod("cartservice-0")] = 25;
  logs.entries[pod("cartservice-1")] = {
      {kStartUs + 1'000'000, "timeout", "early pod-1 line"}};
  logs.per_component_count[pod("cartservice-1")] = 15;

  FusionConfig cfg;
  cfg.top_k = 10;
  EvidenceContext ctx = integrate_evidence(traces, MetricAnomalyReport{}, logs,
                                           window(), cfg);

  const EvidenceBundle* service = nullptr;
  for (const auto& b : ctx.bundles) {
    if (b.component.level == ComponentLevel::Service) service = &b;
  }
  REQUIRE(service != nullptr);
  CHECK(service->component.name == "cartservice");
  REQUIRE(service->log.has_value());
  CHECK(service->log->match_count == 40);
  REQUIRE(service->log->entries.size() == 2);
  // Merged entries are time-ordered across pods.
  CHECK(service->log->entries[0].excerpt == "early pod-1 line");
  CHECK(service->log->entries[1].excerpt == "late pod-0 line");
  // Pod bundles keep their own evidence untouched.
  const EvidenceBundle* pod0 = find_bundle(ctx, "cartservice-0");
  REQUIRE(pod0 != nullptr);
  REQUIRE(pod0->log.has_value());
  CHECK(pod0->log->match_count == 25);
}

TEST_CASE("top_k caps the bundle list at the highest scores") {
  FusionConfig cfg;
  cfg.top_k = 1;
  EvidenceContext ctx = integrate_evidence(trace_report(), metric_report(),
                                           log_report(), window(), cfg);
  REQUIRE(ctx.bundles.size() == 1);
  CHECK(ctx.bundles[0].component.name == "cartservice-0");
}

TEST_CASE("serialization is deterministic and parses as JSON") {
  FusionConfig cfg;
  EvidenceContext ctx = integrate_evidence(trace_report(), metric_report(),
                                           log_report(), window(), cfg);
  const std::string a = serialize_context(ctx, cfg);
  const std::string b = serialize_context(ctx, cfg);
  CHECK(a == b);

  const auto doc = nlohmann::json::parse(a);
  CHECK(doc["strategy"] == "final");
  CHECK(doc["bundles"].size() == 3);
  CHECK(doc["bundles"][0]["component"] == "cartservice-0");
  CHECK(doc["bundles"][0]["trace"]["error_count"] == 9);
  CHECK(doc["case_window"]["start"].get<std::string>().find("2023-11-14") == 0);
  CHECK(doc["modalities"]["traces"] == true);
}

TEST_CASE("serialization never exceeds the context budget") {
  FusionConfig cfg;
  cfg.max_context_chars = 2048;

  LogAnomalyReport logs;
  logs.truncation_limit = 50;
  for (int c = 0; c < 4; ++c) {
    const ComponentId comp = pod("service" + std::to_string(c) + "-0");
    for (int i = 0; i < 50; ++i) {
      logs.entries[comp].push_back(
          {kStartUs + i * 1'000'000, "error",
           "request failed with a long explanatory message describing retry "
           "behaviour and upstream addresses, line " +
               std::to_string(i)});
    }
    logs.per_component_count[comp] = 120;
  }
  MetricAnomalyReport metrics;
  for (int c = 0; c < 4; ++c) {
    const ComponentId comp = pod("service" + std::to_string(c) + "-0");
    for (int i = 0; i < 20; ++i) {
      metrics.anomalies.push_back(MetricAnomaly{
          comp, "rrt", AnomalyKind::Threshold, kStartUs + i * 1'000'000,
          5.0 + i, "z-score above threshold in window segment"});
    }
  }

  FusionConfig wide = cfg;
  wide.top_k = 10;
  EvidenceContext ctx = integrate_evidence(TraceAnomalyReport{}, metrics, logs,
                                           window(), wide);
  const std::string out = serialize_context(ctx, cfg);
  CHECK(out.size() <= cfg.max_context_chars);
  // Shrinking sheds entries, not validity.
  const auto doc = nlohmann::json::parse(out);
  CHECK(doc.contains("bundles"));
  CHECK(doc["bundles"].size() >= 1);
}

TEST_CASE("original serialization truncates the dump at line boundaries") {
  FusionConfig cfg;
  cfg.strategy = FusionStrategy::Original;
  cfg.max_context_chars = 100000;

  PreprocessedDataset pre = tiny_dataset();
  for (int i = 0; i < 3000; ++i) {
    pre.log_groups[pod("cartservice-0")].push_back(LogRecord{
        "cartservice-0", kStartUs + 4'000'000 + i,
        "verbose diagnostic line number " + std::to_string(i) +
            " with plenty of padding text to occupy the dump budget"});
  }
  EvidenceContext ctx = apply_strategy(pre, TraceAnomalyReport{},
                                       MetricAnomalyReport{}, LogAnomalyReport{},
                                       cfg);

  FusionConfig tight = cfg;
  tight.max_context_chars = 4096;
  const std::string out = serialize_context(ctx, tight);
  CHECK(out.size() <= tight.max_context_chars);
  const auto doc = nlohmann::json::parse(out);
  const std::string dump = doc["dump"].get<std::string>();
  CHECK_FALSE(dump.empty());
  CHECK(dump.back() == '\n');
}

TEST_CASE("strategy names round-trip") {
  for (FusionStrategy s : {FusionStrategy::Original, FusionStrategy::Early,
                           FusionStrategy::Intermediate, FusionStrategy::Final}) {
    CHECK(fusion_strategy_from_name(std::string(fusion_strategy_name(s))) == s);
  }
  CHECK_THROWS_AS(fusion_strategy_from_name("late"), Error);
}

TEST_CASE("fusion config validation") {
  FusionConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.weight_trace = -1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = FusionConfig{};
  cfg.top_k = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = FusionConfig{};
  cfg.max_context_chars = 100;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

}  // namespace
}  // namespace orca

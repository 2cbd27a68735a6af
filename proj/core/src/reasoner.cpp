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

#include "orca/reasoner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "orca/common.hpp"
#include "orca/log_analysis.hpp"

namespace orca {

namespace {

using nlohmann::json;

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string join_path(const std::vector<std::string>& path) {
  std::string out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += " -> ";
    out += path[i];
  }
  return out;
}

// Metric families whose anomalies justify a dedicated APM drill-down step.
bool is_apm_metric(const MetricAnomaly& a) {
  if (a.kind == AnomalyKind::Mismatch) return true;
  static const std::set<std::string> kFamilies = {
      "request",      "response",     "request_response", "error_ratio",
      "client_error", "server_error", "timeout"};
  return kFamilies.count(a.metric_name) > 0;
}

Diagnosis mock_reason_on_dump(const EvidenceContext& ctx) {
  const KeywordConfig keywords;
  std::map<std::string, int> counts;
  size_t total_lines = 0, flagged = 0;
  std::istringstream stream(ctx.raw_dump);
  std::string line;
  while (std::getline(stream, line)) {
    if (line.empty()) continue;
    ++total_lines;
    bool anomalous = matches_keywords(line, keywords, nullptr);
    if (!anomalous) {
      const size_t pos = line.find(" status=");
      if (pos != std::string::npos) {
        const std::string value = line.substr(pos + 8);
        anomalous = !value.empty() && value != "0";
      }
    }
    if (!anomalous) continue;
    ++flagged;
    // Dump lines carry the component as their third token.
    std::istringstream tokens(line);
    std::string kind, ts, component;
    if (tokens >> kind >> ts >> component) counts[component] += 1;
  }

  std::string best;
  int best_count = 0;
  for (const auto& [component, count] : counts) {
    if (count > best_count) {
      best = component;
      best_count = count;
    }
  }

  Diagnosis d;
  d.component = best.empty() ? "unknown" : best;
  d.reason = best.empty()
                 ? "no anomalous records visible in the truncated dump"
                 : best + " dominates the error-bearing records in the dump (" +
                       std::to_string(best_count) + " lines)";
  d.reasoning_trace.push_back(
      {1, "ContextScan(dump)",
       "scanned " + std::to_string(total_lines) + " records, " +
           std::to_string(flagged) + " carried error markers"});
  return d;
}

}  // namespace

std::string_view backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::HttpChat: return "http_chat";
    case BackendKind::Mock: return "mock";
  }
  return "unknown";
}

BackendKind backend_kind_from_name(const std::string& name) {
  if (name == "http_chat") return BackendKind::HttpChat;
  if (name == "mock") return BackendKind::Mock;
  throw Error(ErrorCode::InvalidConfig, "unknown backend kind: " + name);
}

void BackendConfig::validate() const {
  if (kind == BackendKind::HttpChat) {
    if (endpoint.rfind("http://", 0) != 0) {
      throw Error(ErrorCode::InvalidConfig,
                  "http_chat backends need an http:// endpoint (TLS is not "
                  "compiled in); got '" +
                      endpoint + "'");
    }
  }
  if (max_retries < 0)
    throw Error(ErrorCode::InvalidConfig, "max_retries must be >= 0");
  if (!(timeout_s > 0.0))
    throw Error(ErrorCode::InvalidConfig, "timeout_s must be positive");
  if (temperature < 0.0 || !std::isfinite(temperature))
    throw Error(ErrorCode::InvalidConfig, "temperature must be non-negative");
}

std::string build_prompt(const EvidenceContext& ctx, const FusionConfig& fusion) {
  if (ctx.strategy == FusionStrategy::Original ? ctx.raw_dump.empty()
                                               : ctx.bundles.empty()) {
    throw Error(ErrorCode::NoEvidence, "cannot build a prompt from an empty context");
  }
  std::string prompt;
  prompt +=
      "You are a site reliability engineer performing root cause analysis "
      "for a microservice incident.\n";
  prompt +=
      "Identify the single component (service or pod) most likely to be the "
      "root cause.\n\nTelemetry evidence (JSON):\n";
  prompt += serialize_context(ctx, fusion);
  prompt +=
      "\n\nReply with exactly one JSON object and nothing else, matching "
      "this schema:\n"
      "{\"component\": \"<service-or-pod-identifier>\", "
      "\"reason\": \"<short explanation>\", "
      "\"reasoning_trace\": [{\"step\": 1, \"action\": \"ToolName(args)\", "
      "\"observation\": \"<what the tool showed>\"}]}\n"
      "Number the steps from 1 without gaps and use the lower-case component "
      "identifier exactly as it appears in the evidence.";
  return prompt;
}

std::string infer(const BackendConfig& cfg, const std::string& prompt) {
  cfg.validate();
  if (cfg.kind != BackendKind::HttpChat) {
    throw Error(ErrorCode::InvalidConfig, "infer() needs an http_chat backend");
  }

  const size_t path_pos = cfg.endpoint.find('/', 7);
  const std::string host = cfg.endpoint.substr(0, path_pos);
  const std::string path =
      path_pos == std::string::npos ? "/" : cfg.endpoint.substr(path_pos);

  httplib::Client client(host);
  const auto timeout =
      std::chrono::milliseconds(static_cast<int64_t>(cfg.timeout_s * 1000.0));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str());
      key != nullptr && key[0] != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  json body;
  body["messages"] = json::array({{{"content", prompt}, {"role", "user"}}});
  body["model"] = cfg.model_name;
  body["temperature"] = cfg.temperature;
  const std::string payload = body.dump();

  std::string last_failure;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    }
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      json doc = json::parse(res->body, nullptr, false);
      if (doc.is_discarded() || !doc.contains("choices") || !doc["choices"].is_array() ||
          doc["choices"].empty() || !doc["choices"][0].contains("message") ||
          !doc["choices"][0]["message"].contains("content") ||
          !doc["choices"][0]["message"]["content"].is_string()) {
        throw Error(ErrorCode::MalformedOutput,
                    "backend reply lacks choices[0].message.content");
      }
      return doc["choices"][0]["message"]["content"].get<std::string>();
    }
    const std::string excerpt = res->body.substr(0, 200);
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status) + ": " + excerpt;
      continue;
    }
    throw Error(ErrorCode::BackendHTTPError,
                "backend returned HTTP " + std::to_string(res->status) + ": " + excerpt);
  }

  if (last_failure.rfind("HTTP ", 0) == 0) {
    throw Error(ErrorCode::BackendHTTPError,
                "backend kept failing after " + std::to_string(cfg.max_retries + 1) +
                    " attempts; last: " + last_failure);
  }
  throw Error(ErrorCode::BackendTimeout,
              "no backend response after " + std::to_string(cfg.max_retries + 1) +
                  " attempts; last: " + last_failure);
}

// Service candidates gain trace evidence only through escalation (every
// observed pod of the service was anomalous), so when the top bundle is one
// of those pods the service bundle is the better answer.
static const EvidenceBundle& reported_bundle(const EvidenceContext& ctx) {
  const EvidenceBundle& top = ctx.bundles.front();
  if (top.component.level != ComponentLevel::Pod) return top;
  const std::string service = service_of_pod(top.component.name);
  for (const EvidenceBundle& b : ctx.bundles) {
    if (b.component.level == ComponentLevel::Service &&
        b.component.name == service && b.trace) {
      return b;
    }
  }
  return top;
}

Diagnosis mock_reason(const EvidenceContext& ctx) {
  if (ctx.strategy == FusionStrategy::Original) return mock_reason_on_dump(ctx);
  if (ctx.bundles.empty()) {
    throw Error(ErrorCode::NoEvidence, "mock reasoner got a context without bundles");
  }

  const EvidenceBundle& top = reported_bundle(ctx);
  const std::string& comp = top.component.name;

  Diagnosis d;
  d.component = comp;
  std::vector<std::string> fragments;
  int step = 1;

  if (top.trace) {
    std::string obs = std::to_string(top.trace->error_count) +
                      " erroring calls terminate at " + comp;
    if (!top.trace->paths.empty()) {
      obs += "; propagation path: " + join_path(top.trace->paths.front());
    }
    d.reasoning_trace.push_back(
        {step++,
         "TraceAnalysis(" + format_utc_s(ctx.case_window.start_s) + " .. " +
             format_utc_s(ctx.case_window.end_s) + ")",
         obs});
    fragments.push_back(std::to_string(top.trace->error_count) +
                        " failing calls end at it");
  }

  if (top.metric) {
    const MetricAnomaly* strongest = nullptr;
    for (const auto& a : top.metric->anomalies) {
      if (strongest == nullptr || a.severity > strongest->severity) strongest = &a;
    }
    std::string obs = std::to_string(top.metric->anomalies.size()) +
                      " metric anomalies (total severity " +
                      format_value(top.metric->total_severity) + ")";
    if (strongest != nullptr) {
      obs += "; strongest: " + strongest->metric_name + " " +
             std::string(anomaly_kind_name(strongest->kind)) + ", " + strongest->detail;
    }
    d.reasoning_trace.push_back({step++, "MetricsAnalysis(" + comp + ")", obs});
    fragments.push_back("its metrics deviate (severity " +
                        format_value(top.metric->total_severity) + ")");
  }

  if (top.log) {
    std::string obs = std::to_string(top.log->match_count) +
                      " log lines matched error patterns";
    if (!top.log->entries.empty()) {
      obs += "; first: [" + top.log->entries.front().pattern + "] " +
             top.log->entries.front().excerpt.substr(0, 80);
    }
    d.reasoning_trace.push_back({step++, "LogSearch(" + comp + ")", obs});
    fragments.push_back(std::to_string(top.log->match_count) +
                        " error log lines mention it");
  }

  if (top.metric) {
    std::set<std::string> apm_metrics;
    for (const auto& a : top.metric->anomalies) {
      if (is_apm_metric(a)) apm_metrics.insert(a.metric_name);
    }
    if (!apm_metrics.empty()) {
      std::string obs = "traffic counters corroborate the fault:";
      for (const auto& name : apm_metrics) obs += " " + name;
      d.reasoning_trace.push_back({step++, "AnalyzeAPM(" + comp + ")", obs});
    }
  }

  d.reason = comp + " is the most likely root cause";
  for (size_t i = 0; i < fragments.size(); ++i) {
    d.reason += (i == 0 ? ": " : "; ") + fragments[i];
  }
  return d;
}

Result<Diagnosis> parse_diagnosis(const std::string& raw) {
  size_t search = 0;
  while (true) {
    const size_t start = raw.find('{', search);
    if (start == std::string::npos) {
      return {ErrorCode::MalformedOutput, "no JSON object found in the reply"};
    }
    // Balanced-brace scan that respects string literals and escapes.
    size_t end = std::string::npos;
    int depth = 0;
    bool in_string = false, escaped = false;
    for (size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        if (--depth == 0) {
          end = i;
          break;
        }
      }
    }
    if (end == std::string::npos) {
      return {ErrorCode::MalformedOutput, "unterminated JSON object in the reply"};
    }
    const json doc = json::parse(raw.substr(start, end - start + 1), nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
      search = start + 1;  // prose braces; keep scanning
      continue;
    }

    if (!doc.contains("component") || !doc["component"].is_string()) {
      return {ErrorCode::SchemaViolation, "'component' must be a string"};
    }
    std::string component = doc["component"].get<std::string>();
    const auto isspace = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!component.empty() && isspace(component.front())) component.erase(0, 1);
    while (!component.empty() && isspace(component.back())) component.pop_back();
    std::transform(component.begin(), component.end(), component.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (component.empty()) {
      return {ErrorCode::SchemaViolation, "'component' must not be empty"};
    }
    if (std::any_of(component.begin(), component.end(), isspace)) {
      return {ErrorCode::SchemaViolation, "'component' must be a single identifier"};
    }
    if (!doc.contains("reason") || !doc["reason"].is_string()) {
      return {ErrorCode::SchemaViolation, "'reason' must be a string"};
    }
    if (!doc.contains("reasoning_trace") || !doc["reasoning_trace"].is_array()) {
      return {ErrorCode::SchemaViolation, "'reasoning_trace' must be an array"};
    }

    Diagnosis d;
    d.component = std::move(component);
    d.reason = doc["reason"].get<std::string>();
    int expected = 1;
    for (const auto& item : doc["reasoning_trace"]) {
      if (!item.is_object() || !item.contains("step") ||
          !item["step"].is_number_integer() || !item.contains("action") ||
          !item["action"].is_string() || !item.contains("observation") ||
          !item["observation"].is_string()) {
        return {ErrorCode::SchemaViolation,
                "every reasoning step needs integer 'step', string 'action' "
                "and string 'observation'"};
      }
      if (item["step"].get<int64_t>() != expected) {
        return {ErrorCode::SchemaViolation,
                "reasoning steps must be numbered 1..n without gaps"};
      }
      d.reasoning_trace.push_back({expected, item["action"].get<std::string>(),
                                   item["observation"].get<std::string>()});
      ++expected;
    }
    return d;
  }
}

Diagnosis diagnose(const EvidenceContext& ctx, const FusionConfig& fusion,
                   const BackendConfig& backend) {
  backend.validate();
  if (backend.kind == BackendKind::Mock) return mock_reason(ctx);

  const std::string prompt = build_prompt(ctx, fusion);
  const std::string reply = infer(backend, prompt);
  auto parsed = parse_diagnosis(reply);
  if (parsed.ok()) return std::move(parsed).value();

  const std::string repair =
      prompt + "\n\nYour previous reply could not be used (" +
      parsed.error_message() +
      "). Reply again with exactly one JSON object matching the schema and "
      "nothing else.";
  auto second = parse_diagnosis(infer(backend, repair));
  if (second.ok()) return std::move(second).value();
  throw Error(second.error_code(), second.error_message());
}

}  // namespace orca

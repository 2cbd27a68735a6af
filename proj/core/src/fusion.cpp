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

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "orca/errors.hpp"

namespace orca {

namespace {

using nlohmann::json;

struct BuildFlags {
  bool use_traces = false;
  bool metric_anchors = false;
  bool log_anchors = false;
};

double bundle_score(const EvidenceBundle& b, const FusionConfig& cfg) {
  double score = 0.0;
  if (b.trace) score += cfg.weight_trace * b.trace->error_count;
  if (b.metric) score += cfg.weight_metric * b.metric->total_severity;
  if (b.log) {
    score += cfg.weight_log *
             std::min<double>(b.log->match_count,
                              static_cast<double>(b.log->truncation_limit));
  }
  return score;
}

EvidenceContext build_context(const TraceAnomalyReport& traces,
                              const MetricAnomalyReport& metrics,
                              const LogAnomalyReport& logs,
                              const TimeWindow& window, const FusionConfig& cfg,
                              BuildFlags flags, FusionStrategy strategy) {
  EvidenceContext ctx;
  ctx.case_window = window;
  ctx.strategy = strategy;
  ctx.has_traces = !traces.empty();
  ctx.has_metrics = !metrics.empty();
  ctx.has_logs = !logs.empty();

  std::map<ComponentId, EvidenceBundle> by_component;

  if (flags.use_traces) {
    for (const auto& candidate : traces.candidate_components) {
      EvidenceBundle bundle;
      bundle.component = candidate;
      TraceEvidence ev;
      auto it = traces.candidate_error_counts.find(candidate.name);
      ev.error_count = it == traces.candidate_error_counts.end() ? 0 : it->second;
      for (const auto& path : traces.propagation_paths) {
        if (!path.empty() && path.back() == candidate.name) ev.paths.push_back(path);
      }
      bundle.trace = std::move(ev);
      by_component.emplace(candidate, std::move(bundle));
    }
  }

  std::map<ComponentId, MetricEvidence> metric_by_component;
  for (const auto& a : metrics.anomalies) {
    MetricEvidence& ev = metric_by_component[a.component];
    ev.anomalies.push_back(a);
    ev.total_severity += a.severity;
  }
  for (auto& [component, ev] : metric_by_component) {
    auto it = by_component.find(component);
    if (it != by_component.end()) {
      it->second.metric = std::move(ev);
    } else if (flags.metric_anchors) {
      EvidenceBundle bundle;
      bundle.component = component;
      bundle.metric = std::move(ev);
      by_component.emplace(component, std::move(bundle));
    }
  }

  for (const auto& [component, entries] : logs.entries) {
    LogEvidence ev;
    ev.match_count = logs.per_component_count.at(component);
    ev.truncation_limit = logs.truncation_limit;
    ev.entries = entries;
    auto it = by_component.find(component);
    if (it != by_component.end()) {
      it->second.log = std::move(ev);
    } else if (flags.log_anchors) {
      EvidenceBundle bundle;
      bundle.component = component;
      bundle.log = std::move(ev);
      by_component.emplace(component, std::move(bundle));
    }
  }

  // Log records are keyed per pod; service-level bundles (escalated trace
  // candidates, rollup-series anomalies) inherit their pods' log evidence so
  // the modality survives the escalation.
  for (auto& [component, bundle] : by_component) {
    if (component.level != ComponentLevel::Service || bundle.log) continue;
    LogEvidence merged;
    merged.truncation_limit = logs.truncation_limit;
    bool any = false;
    for (const auto& [pod_component, entries] : logs.entries) {
      if (pod_component.level != ComponentLevel::Pod) continue;
      if (service_of_pod(pod_component.name) != component.name) continue;
      any = true;
      merged.match_count += logs.per_component_count.at(pod_component);
      merged.entries.insert(merged.entries.end(), entries.begin(), entries.end());
    }
    if (!any) continue;
    std::stable_sort(merged.entries.begin(), merged.entries.end(),
                     [](const LogAnomalyEntry& a, const LogAnomalyEntry& b) {
                       return a.timestamp_us < b.timestamp_us;
                     });
    if (merged.truncation_limit > 0 && merged.entries.size() > merged.truncation_limit) {
      merged.entries.resize(merged.truncation_limit);
    }
    bundle.log = std::move(merged);
  }

  for (auto& [component, bundle] : by_component) {
    bundle.score = bundle_score(bundle, cfg);
    ctx.bundles.push_back(std::move(bundle));
  }
  std::stable_sort(ctx.bundles.begin(), ctx.bundles.end(),
                   [](const EvidenceBundle& a, const EvidenceBundle& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.component < b.component;
                   });
  if (ctx.bundles.size() > cfg.top_k) ctx.bundles.resize(cfg.top_k);

  if (ctx.bundles.empty()) {
    throw Error(ErrorCode::NoEvidence,
                std::string("no anomalous evidence to fuse (strategy=") +
                    std::string(fusion_strategy_name(strategy)) + ")");
  }
  return ctx;
}

std::string format_value(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Time-ordered plain-text records, component as the third token of each line.
std::string render_raw_dump(const PreprocessedDataset& pre, size_t budget) {
  std::vector<std::pair<int64_t, std::string>> lines;
  for (const auto& [trace_id, spans] : pre.trace_groups) {
    for (const auto& span : spans) {
      lines.emplace_back(span.start_time,
                         "span " + std::to_string(span.start_time) + " " +
                             component_of_span(span).name + " trace=" + trace_id +
                             " status=" + std::to_string(effective_status(span)));
    }
  }
  for (const auto& series : pre.metric_series) {
    if (series.derived) continue;
    for (const auto& [ts, value] : series.points) {
      lines.emplace_back(ts, "metric " + std::to_string(ts) + " " +
                                 series.component.name + " " + series.metric_name +
                                 "=" + format_value(value));
    }
  }
  for (const auto& [component, records] : pre.log_groups) {
    for (const auto& rec : records) {
      lines.emplace_back(rec.timestamp, "log " + std::to_string(rec.timestamp) + " " +
                                            component.name + " " +
                                            rec.message.substr(0, 200));
    }
  }
  std::sort(lines.begin(), lines.end());

  std::string out;
  for (const auto& [ts, line] : lines) {
    if (out.size() + line.size() + 1 > budget) break;
    out += line;
    out += '\n';
  }
  return out;
}

json bundle_to_json(const EvidenceBundle& b) {
  json doc;
  doc["component"] = b.component.name;
  doc["level"] = std::string(component_level_name(b.component.level));
  doc["score"] = b.score;
  if (b.trace) {
    json t;
    t["error_count"] = b.trace->error_count;
    t["paths"] = b.trace->paths;
    doc["trace"] = std::move(t);
  }
  if (b.metric) {
    json anomalies = json::array();
    for (const auto& a : b.metric->anomalies) {
      json e;
      e["detail"] = a.detail;
      e["kind"] = std::string(anomaly_kind_name(a.kind));
      e["metric"] = a.metric_name;
      e["severity"] = a.severity;
      e["time"] = format_utc_us(a.timestamp_us);
      anomalies.push_back(std::move(e));
    }
    json m;
    m["anomalies"] = std::move(anomalies);
    m["total_severity"] = b.metric->total_severity;
    doc["metric"] = std::move(m);
  }
  if (b.log) {
    json entries = json::array();
    for (const auto& e : b.log->entries) {
      json item;
      item["excerpt"] = e.excerpt;
      item["pattern"] = e.pattern;
      item["time"] = format_utc_us(e.timestamp_us);
      entries.push_back(std::move(item));
    }
    json l;
    l["entries"] = std::move(entries);
    l["match_count"] = b.log->match_count;
    l["shown"] = b.log->entries.size();
    doc["log"] = std::move(l);
  }
  return doc;
}

std::string render_context(const EvidenceContext& ctx,
                           const std::vector<EvidenceBundle>& bundles) {
  json doc;
  json list = json::array();
  for (const auto& b : bundles) list.push_back(bundle_to_json(b));
  doc["bundles"] = std::move(list);
  doc["case_window"] = {{"end", format_utc_s(ctx.case_window.end_s)},
                        {"start", format_utc_s(ctx.case_window.start_s)}};
  doc["modalities"] = {{"logs", ctx.has_logs},
                       {"metrics", ctx.has_metrics},
                       {"traces", ctx.has_traces}};
  doc["strategy"] = std::string(fusion_strategy_name(ctx.strategy));
  return doc.dump();
}

// Drops tail items until the bundle's serialized size fits the budget;
// the first log entry, anomaly and path always survive.
bool shrink_bundle(EvidenceBundle& b, size_t budget) {
  bool changed = false;
  while (bundle_to_json(b).dump().size() > budget) {
    if (b.log && b.log->entries.size() > 1) {
      b.log->entries.pop_back();
      changed = true;
      continue;
    }
    if (b.metric && b.metric->anomalies.size() > 1) {
      b.metric->anomalies.pop_back();
      changed = true;
      continue;
    }
    if (b.trace && b.trace->paths.size() > 1) {
      b.trace->paths.pop_back();
      changed = true;
      continue;
    }
    break;
  }
  return changed;
}

}  // namespace

std::string_view fusion_strategy_name(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::Original: return "original";
    case FusionStrategy::Early: return "early";
    case FusionStrategy::Intermediate: return "intermediate";
    case FusionStrategy::Final: return "final";
  }
  return "unknown";
}

FusionStrategy fusion_strategy_from_name(const std::string& name) {
  for (FusionStrategy s : {FusionStrategy::Original, FusionStrategy::Early,
                           FusionStrategy::Intermediate, FusionStrategy::Final}) {
    if (name == fusion_strategy_name(s)) return s;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown fusion strategy: " + name);
}

void FusionConfig::validate() const {
  for (double w : {weight_trace, weight_metric, weight_log}) {
    if (w < 0.0 || !std::isfinite(w))
      throw Error(ErrorCode::InvalidConfig, "fusion weights must be non-negative");
  }
  if (top_k == 0) throw Error(ErrorCode::InvalidConfig, "top_k must be >= 1");
  if (max_context_chars < 1024)
    throw Error(ErrorCode::InvalidConfig, "max_context_chars must be >= 1024");
}

EvidenceContext integrate_evidence(const TraceAnomalyReport& traces,
                                   const MetricAnomalyReport& metrics,
                                   const LogAnomalyReport& logs,
                                   const TimeWindow& window,
                                   const FusionConfig& cfg) {
  cfg.validate();
  return build_context(traces, metrics, logs, window, cfg,
                       BuildFlags{true, true, true}, FusionStrategy::Final);
}

EvidenceContext apply_strategy(const PreprocessedDataset& pre,
                               const TraceAnomalyReport& traces,
                               const MetricAnomalyReport& metrics,
                               const LogAnomalyReport& logs,
                               const FusionConfig& cfg) {
  cfg.validate();
  switch (cfg.strategy) {
    case FusionStrategy::Original: {
      EvidenceContext ctx;
      ctx.case_window = pre.case_window;
      ctx.strategy = FusionStrategy::Original;
      ctx.has_traces = !pre.trace_groups.empty();
      ctx.has_metrics = !pre.metric_series.empty();
      ctx.has_logs = !pre.log_groups.empty();
      const size_t reserve = 512;
      ctx.raw_dump = render_raw_dump(
          pre, cfg.max_context_chars > reserve ? cfg.max_context_chars - reserve
                                               : cfg.max_context_chars / 2);
      if (ctx.raw_dump.empty())
        throw Error(ErrorCode::NoEvidence, "no records to dump (strategy=original)");
      return ctx;
    }
    case FusionStrategy::Early:
      return build_context(traces, metrics, logs, pre.case_window, cfg,
                           BuildFlags{false, true, false}, FusionStrategy::Early);
    case FusionStrategy::Intermediate:
      return build_context(traces, metrics, logs, pre.case_window, cfg,
                           BuildFlags{true, false, false},
                           FusionStrategy::Intermediate);
    case FusionStrategy::Final:
      return integrate_evidence(traces, metrics, logs, pre.case_window, cfg);
  }
  throw Error(ErrorCode::Internal, "unreachable strategy");
}

std::string serialize_context(const EvidenceContext& ctx, const FusionConfig& cfg) {
  cfg.validate();
  if (ctx.strategy == FusionStrategy::Original) {
    json doc;
    doc["case_window"] = {{"end", format_utc_s(ctx.case_window.end_s)},
                          {"start", format_utc_s(ctx.case_window.start_s)}};
    doc["dump"] = ctx.raw_dump;
    doc["strategy"] = "original";
    std::string dump_text = ctx.raw_dump;
    std::string out = doc.dump();
    while (out.size() > cfg.max_context_chars && !dump_text.empty()) {
      const size_t excess = out.size() - cfg.max_context_chars + 64;
      const size_t keep = dump_text.size() > excess ? dump_text.size() - excess : 0;
      const size_t cut = dump_text.rfind('\n', keep);
      dump_text = cut == std::string::npos ? std::string()
                                           : dump_text.substr(0, cut + 1);
      doc["dump"] = dump_text;
      out = doc.dump();
    }
    if (out.size() > cfg.max_context_chars) out.resize(cfg.max_context_chars);
    return out;
  }

  std::vector<EvidenceBundle> bundles = ctx.bundles;
  std::string out = render_context(ctx, bundles);
  while (out.size() > cfg.max_context_chars) {
    size_t total = 0;
    std::vector<size_t> sizes(bundles.size(), 0);
    for (size_t i = 0; i < bundles.size(); ++i) {
      sizes[i] = bundle_to_json(bundles[i]).dump().size();
      total += sizes[i];
    }
    const size_t overhead = out.size() > total ? out.size() - total : 0;
    const size_t available =
        cfg.max_context_chars > overhead ? cfg.max_context_chars - overhead : 0;

    bool changed = false;
    if (total > 0) {
      for (size_t i = 0; i < bundles.size(); ++i) {
        const size_t budget = available * sizes[i] / total;
        if (shrink_bundle(bundles[i], budget)) changed = true;
      }
    }
    if (!changed) {
      if (bundles.size() > 1) {
        bundles.pop_back();
      } else {
        break;
      }
    }
    out = render_context(ctx, bundles);
  }
  if (out.size() > cfg.max_context_chars) out.resize(cfg.max_context_chars);
  return out;
}

}  // namespace orca

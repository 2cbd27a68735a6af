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

#include "orca/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/parquet/parquet.hpp"

namespace orca {

namespace {

using nlohmann::json;

constexpr int kErrorStatusCode = 14;    // UNAVAILABLE
constexpr int kDeadlineStatusCode = 4;  // DEADLINE_EXCEEDED
// Healthy context on each side of the fault. Detectors lean on medians, so
// the faulted stretch must stay well under half the analyzed window.
constexpr int64_t kCaseWindowPadS = 600;
constexpr int kTracesPerMinute = 12;

const std::vector<std::string>& storefront_services() {
  static const std::vector<std::string> kServices = {
      "adservice",      "cartservice",           "checkoutservice",
      "currencyservice", "emailservice",          "frontend",
      "paymentservice", "productcatalogservice", "recommendationservice",
      "shippingservice"};
  return kServices;
}

// One request shape: the called service and its downstream calls in order.
struct RouteNode {
  std::string service;
  std::vector<RouteNode> children;
};

const std::vector<RouteNode>& routes() {
  static const std::vector<RouteNode> kRoutes = {
      // Browsing: catalog, recommendations, ads, prices.
      {"frontend",
       {{"productcatalogservice", {}},
        {"recommendationservice", {{"productcatalogservice", {}}}},
        {"adservice", {}},
        {"currencyservice", {}}}},
      // Cart view.
      {"frontend",
       {{"cartservice", {}}, {"currencyservice", {}}, {"productcatalogservice", {}}}},
      // Checkout fan-out.
      {"frontend",
       {{"checkoutservice",
         {{"cartservice", {}},
          {"productcatalogservice", {}},
          {"currencyservice", {}},
          {"paymentservice", {}},
          {"shippingservice", {}},
          {"emailservice", {}}}}}}};
  return kRoutes;
}

struct FaultEffects {
  // Trace-visible faults indexed by affected pod.
  std::map<std::string, std::vector<const FaultSpec*>> trace_faults;
  std::map<std::string, std::vector<const FaultSpec*>> metric_faults;
  std::map<std::string, std::vector<const FaultSpec*>> log_faults;
};

bool kind_touches_traces(FaultKind kind) {
  return kind == FaultKind::ErrorStatus || kind == FaultKind::RrtSpike ||
         kind == FaultKind::PodCrash;
}

bool fault_is_trace_visible(const FaultSpec& fault) {
  return fault.grpc_visible && kind_touches_traces(fault.fault_kind);
}

bool fault_touches_metrics(const FaultSpec& fault) {
  return fault.fault_kind == FaultKind::RrtSpike ||
         fault.fault_kind == FaultKind::CpuStress ||
         fault.fault_kind == FaultKind::ReqRespMismatch ||
         fault.fault_kind == FaultKind::PodCrash;
}

FaultEffects index_faults(const Scenario& spec) {
  FaultEffects effects;
  for (const FaultSpec& fault : spec.faults) {
    for (const std::string& pod :
         spec.topology.resolve_pods(fault.target, fault.level)) {
      if (fault_is_trace_visible(fault)) effects.trace_faults[pod].push_back(&fault);
      if (fault_touches_metrics(fault)) effects.metric_faults[pod].push_back(&fault);
      if (fault.fault_kind == FaultKind::LogBurst)
        effects.log_faults[pod].push_back(&fault);
    }
  }
  return effects;
}

int injected_status(FaultKind kind) {
  return kind == FaultKind::RrtSpike ? kDeadlineStatusCode : kErrorStatusCode;
}

// ----- column builders -------------------------------------------------

parquet::Column str_col(std::string name, std::vector<std::string> values) {
  parquet::Column col;
  col.name = std::move(name);
  col.type = parquet::PhysicalType::ByteArray;
  col.defined.assign(values.size(), 1);
  col.strings = std::move(values);
  return col;
}

parquet::Column str_col_nullable(std::string name, std::vector<std::string> values,
                                 std::vector<uint8_t> defined) {
  parquet::Column col;
  col.name = std::move(name);
  col.type = parquet::PhysicalType::ByteArray;
  col.optional = true;
  col.defined = std::move(defined);
  col.strings = std::move(values);
  return col;
}

parquet::Column i64_col(std::string name, std::vector<int64_t> values) {
  parquet::Column col;
  col.name = std::move(name);
  col.type = parquet::PhysicalType::Int64;
  col.defined.assign(values.size(), 1);
  col.ints = std::move(values);
  return col;
}

parquet::Column dbl_col(std::string name, std::vector<double> values) {
  parquet::Column col;
  col.name = std::move(name);
  col.type = parquet::PhysicalType::Double;
  col.defined.assign(values.size(), 1);
  col.doubles = std::move(values);
  return col;
}

void write_columns(const std::string& path, std::vector<parquet::Column> columns) {
  parquet::Table table;
  table.num_rows = columns.empty() ? 0 : static_cast<int64_t>(columns[0].num_rows());
  table.columns = std::move(columns);
  parquet::write_table(path, table);
}

// ----- trace generation -------------------------------------------------

struct SpanRow {
  std::string trace_id;
  std::string span_id;
  std::string parent_span_id;  // empty for roots
  std::string service;
  std::string pod;
  int64_t start_us = 0;
  int64_t duration_us = 0;
  int64_t status = 0;
  std::string tags;
  int parent_index = -1;
};

class TraceBuilder {
 public:
  TraceBuilder(const Scenario& spec, const FaultEffects& effects,
               std::mt19937_64& rng)
      : spec_(spec), effects_(effects), rng_(rng) {}

  std::vector<SpanRow> build() {
    std::vector<SpanRow> rows;
    const int64_t step_us = kMicrosPerMinute / kTracesPerMinute;
    int trace_index = 0;
    for (int64_t t = spec_.span.start_us(); t < spec_.span.end_us(); t += step_us) {
      char id[32];
      std::snprintf(id, sizeof(id), "trace-%06d", trace_index++);
      emit_trace(id, t, rows);
    }
    return rows;
  }

 private:
  void emit_trace(const std::string& trace_id, int64_t start_us,
                  std::vector<SpanRow>& rows) {
    std::uniform_int_distribution<int> route_pick(0, 4);
    const int r = route_pick(rng_);
    const RouteNode& route = routes()[r < 2 ? 0 : (r < 4 ? 1 : 2)];
    const size_t first = rows.size();
    int span_counter = 0;
    emit_span(route, trace_id, -1, start_us, span_counter, rows);
    apply_faults(rows, first);
  }

  // Returns the span's duration so the parent can advance its cursor.
  int64_t emit_span(const RouteNode& node, const std::string& trace_id,
                    int parent_index, int64_t start_us, int& span_counter,
                    std::vector<SpanRow>& rows) {
    const size_t index = rows.size();
    SpanRow row;
    row.trace_id = trace_id;
    row.span_id = trace_id + "." + std::to_string(span_counter++);
    row.parent_index = parent_index;
    if (parent_index >= 0) row.parent_span_id = rows[parent_index].span_id;
    row.service = node.service;
    row.pod = pick_pod(node.service);
    row.start_us = start_us;
    row.tags = "{\"node\":\"" + spec_.topology.pod_node.at(row.pod) + "\"}";
    rows.push_back(std::move(row));

    std::normal_distribution<double> own_work_ms(node.children.empty() ? 40.0 : 20.0,
                                                 node.children.empty() ? 8.0 : 4.0);
    std::normal_distribution<double> gap_ms(2.0, 0.5);
    int64_t cursor = start_us + 1000;
    for (const RouteNode& child : node.children) {
      cursor += emit_span(child, trace_id, static_cast<int>(index), cursor,
                          span_counter, rows);
      cursor += std::max<int64_t>(100, static_cast<int64_t>(gap_ms(rng_) * 1000.0));
    }
    const int64_t work =
        std::max<int64_t>(500, static_cast<int64_t>(own_work_ms(rng_) * 1000.0));
    rows[index].duration_us = (cursor - start_us) + work;
    return rows[index].duration_us;
  }

  std::string pick_pod(const std::string& service) {
    const auto& pods = spec_.topology.service_pods.at(service);
    std::uniform_int_distribution<size_t> pick(0, pods.size() - 1);
    return pods[pick(rng_)];
  }

  // Marks fault-window spans on affected pods and propagates the status up
  // the ancestor chain, so failures surface at every caller.
  void apply_faults(std::vector<SpanRow>& rows, size_t first) {
    for (size_t i = first; i < rows.size(); ++i) {
      auto it = effects_.trace_faults.find(rows[i].pod);
      if (it == effects_.trace_faults.end()) continue;
      for (const FaultSpec* fault : it->second) {
        if (!fault->window.contains_us(rows[i].start_us)) continue;
        const int code = injected_status(fault->fault_kind);
        rows[i].status = code;
        if (fault->fault_kind == FaultKind::RrtSpike) {
          rows[i].duration_us =
              static_cast<int64_t>(fault->magnitude * 1000.0);  // ms -> us
        }
        for (int p = rows[i].parent_index; p >= 0;
             p = rows[static_cast<size_t>(p)].parent_index) {
          rows[static_cast<size_t>(p)].status = code;
        }
      }
    }
  }

  const Scenario& spec_;
  const FaultEffects& effects_;
  std::mt19937_64& rng_;
};

void write_traces(const std::string& path, const std::vector<SpanRow>& rows) {
  std::vector<std::string> trace_ids, span_ids, parents, services, pods, tags;
  std::vector<uint8_t> parent_defined;
  std::vector<int64_t> starts, durations, statuses;
  for (const SpanRow& row : rows) {
    trace_ids.push_back(row.trace_id);
    span_ids.push_back(row.span_id);
    parents.push_back(row.parent_span_id);
    parent_defined.push_back(row.parent_span_id.empty() ? 0 : 1);
    services.push_back(row.service);
    pods.push_back(row.pod);
    starts.push_back(row.start_us);
    durations.push_back(row.duration_us);
    statuses.push_back(row.status);
    tags.push_back(row.tags);
  }
  write_columns(path,
                {str_col("trace_id", std::move(trace_ids)),
                 str_col("span_id", std::move(span_ids)),
                 str_col_nullable("parent_span_id", std::move(parents),
                                  std::move(parent_defined)),
                 str_col("service", std::move(services)),
                 str_col("pod", std::move(pods)),
                 i64_col("start_time", std::move(starts)),
                 i64_col("duration", std::move(durations)),
                 i64_col("status_code", std::move(statuses)),
                 str_col("tags", std::move(tags))});
}

// ----- metric generation ------------------------------------------------

void write_metrics(const std::string& path, const Scenario& spec,
                   const FaultEffects& effects, std::mt19937_64& rng) {
  std::vector<std::string> components, names;
  std::vector<int64_t> timestamps;
  std::vector<double> values;

  std::normal_distribution<double> cpu_noise(15.0, 3.0);
  std::normal_distribution<double> req_noise(100.0, 5.0);
  std::normal_distribution<double> rrt_noise(200.0, 20.0);
  std::normal_distribution<double> spike_noise(0.0, 1.0);

  const auto emit = [&](const std::string& pod, const char* metric, int64_t ts,
                        double value) {
    components.push_back(pod);
    names.push_back(metric);
    timestamps.push_back(ts);
    values.push_back(value);
  };

  for (const auto& [pod, node] : spec.topology.pod_node) {
    (void)node;
    const std::vector<const FaultSpec*>* faults = nullptr;
    if (auto it = effects.metric_faults.find(pod); it != effects.metric_faults.end())
      faults = &it->second;

    for (int64_t ts = spec.span.start_s; ts < spec.span.end_s; ts += 60) {
      double cpu = std::clamp(cpu_noise(rng), 1.0, 99.0);
      double request = std::max(1.0, req_noise(rng));
      double response = request;
      double rrt = std::max(1.0, rrt_noise(rng));
      double server_error = 0.0;

      if (faults != nullptr) {
        for (const FaultSpec* fault : *faults) {
          if (!(fault->window.start_s <= ts && ts < fault->window.end_s)) continue;
          switch (fault->fault_kind) {
            case FaultKind::RrtSpike:
              rrt = fault->magnitude * (1.0 + 0.01 * spike_noise(rng));
              break;
            case FaultKind::CpuStress:
              cpu = std::min(99.0, cpu + fault->magnitude);
              break;
            case FaultKind::ReqRespMismatch:
              response = std::round(request * (1.0 - fault->magnitude));
              break;
            case FaultKind::PodCrash:
              response = std::round(request * (1.0 - fault->magnitude));
              server_error = request - response;
              break;
            default:
              break;
          }
        }
      }

      emit(pod, "cpu_usage", ts, cpu);
      emit(pod, "request", ts, request);
      emit(pod, "response", ts, response);
      emit(pod, "rrt", ts, rrt);
      emit(pod, "server_error", ts, server_error);
    }
  }

  write_columns(path, {str_col("component", std::move(components)),
                       i64_col("timestamp", std::move(timestamps)),
                       str_col("metric_name", std::move(names)),
                       dbl_col("value", std::move(values))});
}

// ----- log generation ---------------------------------------------------

// Baseline chatter stays clear of the filter keywords and of standalone
// 400/404/500 tokens so injected counts are exactly recoverable.
std::string chatter_line(int variant, int arg) {
  char buf[96];
  switch (variant % 4) {
    case 0:
      std::snprintf(buf, sizeof(buf), "handled GET /api/catalog in %d ms", arg % 97 + 3);
      break;
    case 1:
      std::snprintf(buf, sizeof(buf), "session cache refresh complete, %d entries",
                    arg % 240 + 16);
      break;
    case 2:
      std::snprintf(buf, sizeof(buf), "health probe ok");
      break;
    default:
      std::snprintf(buf, sizeof(buf), "published telemetry batch of %d points",
                    arg % 90 + 8);
      break;
  }
  return buf;
}

std::string burst_line(int variant) {
  switch (variant % 5) {
    case 0: return "connection error talking to upstream dependency";
    case 1: return "request Timeout after 5000 ms";
    case 2: return "unhandled Exception while serving request";
    case 3: return "Failed to persist state change";
    default: return "upstream replied HTTP 500";
  }
}

void write_logs(const std::string& path, const Scenario& spec,
                const FaultEffects& effects, std::mt19937_64& rng) {
  std::vector<std::string> components, messages;
  std::vector<int64_t> timestamps;

  std::uniform_int_distribution<int> variant_pick(0, 1023);
  for (const auto& [pod, node] : spec.topology.pod_node) {
    (void)node;
    for (int64_t ts = spec.span.start_s; ts < spec.span.end_s; ts += 60) {
      for (int64_t offset_s : {10, 40}) {
        components.push_back(pod);
        timestamps.push_back((ts + offset_s) * kMicrosPerSecond);
        const int v = variant_pick(rng);
        messages.push_back(chatter_line(v, v / 4));
      }
    }
  }

  for (const auto& [pod, faults] : effects.log_faults) {
    for (const FaultSpec* fault : faults) {
      const int count = static_cast<int>(std::llround(fault->magnitude));
      const int64_t window_us = fault->window.end_us() - fault->window.start_us();
      for (int i = 0; i < count; ++i) {
        components.push_back(pod);
        timestamps.push_back(fault->window.start_us() +
                             window_us * i / std::max(count, 1));
        messages.push_back(burst_line(i));
      }
    }
  }

  write_columns(path, {str_col("component", std::move(components)),
                       i64_col("timestamp", std::move(timestamps)),
                       str_col("message", std::move(messages))});
}

// ----- spec validation / ground truth ------------------------------------

std::string root_component_of(const FaultSpec& fault) {
  return fault.level == ComponentLevel::Pod ? service_of_pod(fault.target)
                                            : fault.target;
}

std::vector<std::string> key_metrics_for(FaultKind kind) {
  switch (kind) {
    case FaultKind::RrtSpike: return {"rrt"};
    case FaultKind::CpuStress: return {"cpu_usage"};
    case FaultKind::ReqRespMismatch: return {"request", "response"};
    case FaultKind::PodCrash: return {"error_ratio", "response"};
    default: return {};
  }
}

}  // namespace

std::string_view fault_kind_name(FaultKind kind) {
  switch (kind) {
    case FaultKind::ErrorStatus: return "error_status";
    case FaultKind::RrtSpike: return "rrt_spike";
    case FaultKind::CpuStress: return "cpu_stress";
    case FaultKind::ReqRespMismatch: return "req_resp_mismatch";
    case FaultKind::LogBurst: return "log_burst";
    case FaultKind::PodCrash: return "pod_crash";
  }
  return "unknown";
}

FaultKind fault_kind_from_name(const std::string& name) {
  for (FaultKind kind :
       {FaultKind::ErrorStatus, FaultKind::RrtSpike, FaultKind::CpuStress,
        FaultKind::ReqRespMismatch, FaultKind::LogBurst, FaultKind::PodCrash}) {
    if (name == fault_kind_name(kind)) return kind;
  }
  throw Error(ErrorCode::InvalidSpec, "unknown fault kind: " + name);
}

Topology Topology::standard() {
  Topology topo;
  std::vector<std::string> pods;
  for (const std::string& service : storefront_services()) {
    for (int i = 0; i < 3; ++i) {
      const std::string pod = service + "-" + std::to_string(i);
      topo.service_pods[service].push_back(pod);
      pods.push_back(pod);
    }
  }
  for (const char* name : {"tidb-tidb", "tidb-pd", "tidb-tikv"}) {
    const std::string service(name);
    const std::string pod = service + "-0";
    topo.service_pods[service].push_back(pod);
    pods.push_back(pod);
  }
  std::sort(pods.begin(), pods.end());
  for (size_t i = 0; i < pods.size(); ++i) {
    topo.pod_node[pods[i]] = "node-" + std::to_string(i % 8 + 1);
  }
  return topo;
}

bool Topology::has_component(const std::string& name, ComponentLevel level) const {
  switch (level) {
    case ComponentLevel::Service:
      return service_pods.count(name) > 0;
    case ComponentLevel::Pod:
      return pod_node.count(name) > 0;
    case ComponentLevel::Node:
      for (const auto& [pod, node] : pod_node) {
        (void)pod;
        if (node == name) return true;
      }
      return false;
  }
  return false;
}

std::vector<std::string> Topology::resolve_pods(const std::string& name,
                                                ComponentLevel level) const {
  std::vector<std::string> pods;
  switch (level) {
    case ComponentLevel::Service: {
      auto it = service_pods.find(name);
      if (it != service_pods.end()) pods = it->second;
      break;
    }
    case ComponentLevel::Pod:
      if (pod_node.count(name) > 0) pods.push_back(name);
      break;
    case ComponentLevel::Node:
      for (const auto& [pod, node] : pod_node) {
        if (node == name) pods.push_back(pod);
      }
      break;
  }
  std::sort(pods.begin(), pods.end());
  return pods;
}

GroundTruth derive_ground_truth(const Scenario& spec) {
  if (!spec.span.valid()) {
    throw Error(ErrorCode::InvalidSpec, "scenario span must be a valid window");
  }
  if (spec.faults.empty()) {
    throw Error(ErrorCode::InvalidSpec, "scenario needs at least one fault");
  }

  GroundTruth truth;
  int64_t window_start = 0, window_end = 0;
  for (size_t i = 0; i < spec.faults.size(); ++i) {
    const FaultSpec& fault = spec.faults[i];
    if (!spec.topology.has_component(fault.target, fault.level)) {
      throw Error(ErrorCode::InvalidSpec,
                  std::string("fault target '") + fault.target + "' is not a " +
                      std::string(component_level_name(fault.level)) +
                      " in the topology");
    }
    if (!fault.window.valid() || fault.window.start_s < spec.span.start_s ||
        fault.window.end_s > spec.span.end_s) {
      throw Error(ErrorCode::InvalidSpec,
                  "fault window must lie inside the scenario span");
    }
    if (!(fault.magnitude > 0.0) || !std::isfinite(fault.magnitude)) {
      throw Error(ErrorCode::InvalidSpec, "fault magnitude must be positive");
    }
    if ((fault.fault_kind == FaultKind::ReqRespMismatch ||
         fault.fault_kind == FaultKind::PodCrash) &&
        fault.magnitude > 1.0) {
      throw Error(ErrorCode::InvalidSpec,
                  "dropped-response fraction must be in (0, 1]");
    }
    if (root_component_of(fault) != root_component_of(spec.faults[0])) {
      throw Error(ErrorCode::InvalidSpec,
                  "all faults must share one root cause; '" + fault.target +
                      "' disagrees with '" + spec.faults[0].target + "'");
    }

    char desc[160];
    std::snprintf(desc, sizeof(desc), "%s-level %s on %s (magnitude %.6g)",
                  std::string(component_level_name(fault.level)).c_str(),
                  std::string(fault_kind_name(fault.fault_kind)).c_str(),
                  fault.target.c_str(), fault.magnitude);
    truth.fault_descriptions.push_back(desc);
    for (const std::string& metric : key_metrics_for(fault.fault_kind)) {
      truth.key_metrics.push_back(metric);
    }

    if (i == 0) {
      window_start = fault.window.start_s;
      window_end = fault.window.end_s;
    } else {
      window_start = std::min(window_start, fault.window.start_s);
      window_end = std::max(window_end, fault.window.end_s);
    }
  }

  std::sort(truth.key_metrics.begin(), truth.key_metrics.end());
  truth.key_metrics.erase(
      std::unique(truth.key_metrics.begin(), truth.key_metrics.end()),
      truth.key_metrics.end());
  truth.component = ComponentId{spec.faults[0].target, spec.faults[0].level};
  truth.case_window =
      TimeWindow{std::max(spec.span.start_s, window_start - kCaseWindowPadS),
                 std::min(spec.span.end_s, window_end + kCaseWindowPadS)};
  return truth;
}

GeneratedScenario generate_scenario(const Scenario& spec, const std::string& out_dir) {
  GroundTruth truth = derive_ground_truth(spec);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::FileNotReadable,
                "cannot create output directory '" + out_dir + "': " + ec.message());
  }

  const FaultEffects effects = index_faults(spec);
  std::mt19937_64 rng(spec.seed);

  GeneratedScenario out;
  out.directory = out_dir;
  out.trace_path = out_dir + "/traces.parquet";
  out.metric_path = out_dir + "/metrics.parquet";
  out.log_path = out_dir + "/logs.parquet";
  out.truth_path = out_dir + "/ground_truth.json";
  out.truth = truth;

  TraceBuilder builder(spec, effects, rng);
  write_traces(out.trace_path, builder.build());
  write_metrics(out.metric_path, spec, effects, rng);
  write_logs(out.log_path, spec, effects, rng);

  json doc;
  doc["component"] = truth.component.name;
  doc["level"] = std::string(component_level_name(truth.component.level));
  doc["faults"] = truth.fault_descriptions;
  doc["key_metrics"] = truth.key_metrics;
  doc["case_window"] = {{"end", truth.case_window.end_s},
                        {"start", truth.case_window.start_s}};
  const std::string text = doc.dump(2) + "\n";
  FILE* f = std::fopen(out.truth_path.c_str(), "wb");
  if (f == nullptr) {
    throw Error(ErrorCode::FileNotReadable,
                "cannot write ground truth file: " + out.truth_path);
  }
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
  return out;
}

Scenario scenario_from_json(const std::string& text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::InvalidSpec, "scenario spec is not a JSON object");
  }
  Scenario spec;
  try {
    spec.seed = doc.at("seed").get<uint64_t>();
    spec.span = TimeWindow{doc.at("span").at("start").get<int64_t>(),
                           doc.at("span").at("end").get<int64_t>()};
    for (const json& f : doc.at("faults")) {
      FaultSpec fault;
      const std::string level = f.at("level").get<std::string>();
      if (level == "service") fault.level = ComponentLevel::Service;
      else if (level == "pod") fault.level = ComponentLevel::Pod;
      else if (level == "node") fault.level = ComponentLevel::Node;
      else throw Error(ErrorCode::InvalidSpec, "unknown fault level: " + level);
      fault.target = f.at("target").get<std::string>();
      fault.fault_kind = fault_kind_from_name(f.at("kind").get<std::string>());
      fault.window = TimeWindow{f.at("window").at("start").get<int64_t>(),
                                f.at("window").at("end").get<int64_t>()};
      fault.magnitude = f.at("magnitude").get<double>();
      fault.grpc_visible = f.value("grpc_visible", kind_touches_traces(fault.fault_kind));
      spec.faults.push_back(std::move(fault));
    }
    if (doc.contains("topology")) {
      Topology topo;
      for (const auto& [service, pods] : doc["topology"].at("services").items()) {
        for (const json& pod : pods) {
          topo.service_pods[service].push_back(pod.get<std::string>());
        }
        std::sort(topo.service_pods[service].begin(), topo.service_pods[service].end());
      }
      for (const auto& [pod, node] : doc["topology"].at("nodes").items()) {
        topo.pod_node[pod] = node.get<std::string>();
      }
      spec.topology = std::move(topo);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidSpec,
                std::string("malformed scenario spec: ") + e.what());
  }
  return spec;
}

std::string scenario_to_json(const Scenario& spec) {
  json doc;
  doc["seed"] = spec.seed;
  doc["span"] = {{"end", spec.span.end_s}, {"start", spec.span.start_s}};
  json faults = json::array();
  for (const FaultSpec& fault : spec.faults) {
    json f;
    f["level"] = std::string(component_level_name(fault.level));
    f["target"] = fault.target;
    f["kind"] = std::string(fault_kind_name(fault.fault_kind));
    f["window"] = {{"end", fault.window.end_s}, {"start", fault.window.start_s}};
    f["magnitude"] = fault.magnitude;
    f["grpc_visible"] = fault.grpc_visible;
    faults.push_back(std::move(f));
  }
  doc["faults"] = std::move(faults);
  json services, nodes;
  for (const auto& [service, pods] : spec.topology.service_pods) services[service] = pods;
  for (const auto& [pod, node] : spec.topology.pod_node) nodes[pod] = node;
  doc["topology"] = {{"nodes", std::move(nodes)}, {"services", std::move(services)}};
  return doc.dump(2) + "\n";
}

std::vector<Scenario> standard_corpus(uint64_t seed, int64_t start_s, size_t count) {
  struct MixEntry {
    FaultKind kind;
    double share;
  };
  static const MixEntry kMix[] = {
      {FaultKind::ErrorStatus, 0.40}, {FaultKind::RrtSpike, 0.20},
      {FaultKind::PodCrash, 0.15},    {FaultKind::CpuStress, 0.12},
      {FaultKind::ReqRespMismatch, 0.08}, {FaultKind::LogBurst, 0.05}};

  // Largest-remainder apportionment of the kind mix over `count` slots.
  std::vector<FaultKind> kinds;
  {
    size_t assigned = 0;
    std::vector<std::pair<double, FaultKind>> remainders;
    for (const MixEntry& entry : kMix) {
      const double exact = entry.share * static_cast<double>(count);
      const size_t base = static_cast<size_t>(exact);
      for (size_t i = 0; i < base; ++i) kinds.push_back(entry.kind);
      assigned += base;
      remainders.emplace_back(exact - static_cast<double>(base), entry.kind);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (size_t i = 0; assigned < count; ++i, ++assigned) {
      kinds.push_back(remainders[i % remainders.size()].second);
    }
  }
  std::mt19937_64 shuffle_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(kinds.begin(), kinds.end(), shuffle_rng);

  std::vector<Scenario> corpus;
  corpus.reserve(count);
  const auto& services = storefront_services();
  for (size_t i = 0; i < count; ++i) {
    Scenario spec;
    spec.seed = seed + static_cast<uint64_t>(i) * 1000003ULL;
    const int64_t t0 = start_s + static_cast<int64_t>(i) * 3600;
    spec.span = TimeWindow{t0, t0 + 1800};

    FaultSpec fault;
    fault.fault_kind = kinds[i];
    fault.window = TimeWindow{t0 + 600, t0 + 1200};
    const std::string& service = services[i % services.size()];
    if (i % 2 == 0) {
      fault.level = ComponentLevel::Service;
      fault.target = service;
    } else {
      fault.level = ComponentLevel::Pod;
      fault.target = service + "-" + std::to_string((i / 2) % 3);
    }
    switch (kinds[i]) {
      case FaultKind::ErrorStatus:
        fault.magnitude = 1.0;
        fault.grpc_visible = true;
        break;
      case FaultKind::RrtSpike:
        fault.magnitude = 5000.0 + static_cast<double>(i % 5) * 2000.0;
        fault.grpc_visible = true;
        break;
      case FaultKind::PodCrash:
        fault.magnitude = 0.9;
        fault.grpc_visible = true;
        break;
      case FaultKind::CpuStress:
        fault.magnitude = 55.0 + static_cast<double>(i % 3) * 10.0;
        fault.grpc_visible = false;
        break;
      case FaultKind::ReqRespMismatch:
        fault.magnitude = 0.8;
        fault.grpc_visible = false;
        break;
      case FaultKind::LogBurst:
        fault.magnitude = 40.0 + static_cast<double>(i % 3) * 10.0;
        fault.grpc_visible = false;
        break;
    }
    spec.faults.push_back(std::move(fault));
    corpus.push_back(std::move(spec));
  }
  return corpus;
}

}  // namespace orca

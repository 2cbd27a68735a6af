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

#include "orca/trace_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>
#include <tuple>

namespace orca {

namespace {

bool parse_int(const std::string& text, int& out) {
  if (text.empty()) return false;
  size_t i = (text[0] == '-') ? 1 : 0;
  if (i >= text.size()) return false;
  long value = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
    value = value * 10 + (text[i] - '0');
    if (value > 1'000'000) return false;
  }
  out = static_cast<int>(text[0] == '-' ? -value : value);
  return true;
}

}  // namespace

int effective_status(const SpanRecord& span) {
  if (span.status_code != 0) return span.status_code;
  for (const char* key :
       {"grpc.status_code", "rpc.grpc.status_code", "grpc_status_code",
        "status_code", "otel.status_code"}) {
    auto it = span.tags.find(key);
    if (it == span.tags.end()) continue;
    int value = 0;
    if (parse_int(it->second, value) && value != 0) return value;
  }
  return 0;
}

ComponentId component_of_span(const SpanRecord& span) {
  return classify_component(span.pod.empty() ? span.service : span.pod);
}

std::vector<CallTree> build_call_trees(
    const std::map<std::string, std::vector<SpanRecord>>& trace_groups) {
  std::vector<CallTree> forest;
  forest.reserve(trace_groups.size());

  for (const auto& [trace_id, spans] : trace_groups) {
    CallTree tree;
    tree.trace_id = trace_id;
    tree.nodes.reserve(spans.size());

    std::map<std::string, size_t> by_span_id;
    size_t duplicates = 0;
    for (const auto& span : spans) {
      if (by_span_id.count(span.span_id)) {
        ++duplicates;
        continue;
      }
      by_span_id[span.span_id] = tree.nodes.size();
      CallNode node;
      node.span = span;
      node.is_anomalous = effective_status(span) != 0;
      tree.nodes.push_back(std::move(node));
    }
    if (duplicates > 0) {
      tree.warnings.push_back("trace " + trace_id + ": " +
                              std::to_string(duplicates) +
                              " duplicate span ids skipped");
    }

    // Parent links; missing parents leave extra roots.
    for (auto& node : tree.nodes) {
      if (!node.span.parent_span_id) continue;
      auto it = by_span_id.find(*node.span.parent_span_id);
      if (it == by_span_id.end()) continue;
      if (&tree.nodes[it->second] == &node) continue;  // self-reference
      node.parent = it->second;
    }

    // Cycle cut: walk each parent chain once with tricolor marking. A grey
    // revisit means the chain loops; the current node is promoted to root.
    enum : uint8_t { kWhite = 0, kGrey = 1, kBlack = 2 };
    std::vector<uint8_t> color(tree.nodes.size(), kWhite);
    for (size_t start = 0; start < tree.nodes.size(); ++start) {
      if (color[start] != kWhite) continue;
      std::vector<size_t> chain;
      size_t cur = start;
      while (cur != kNoParent && color[cur] == kWhite) {
        color[cur] = kGrey;
        chain.push_back(cur);
        cur = tree.nodes[cur].parent;
      }
      if (cur != kNoParent && color[cur] == kGrey) {
        tree.warnings.push_back(
            "trace " + trace_id + ": cyclic reference at span '" +
            tree.nodes[cur].span.span_id + "', edge to parent '" +
            *tree.nodes[cur].span.parent_span_id + "' cut");
        tree.nodes[cur].parent = kNoParent;
      }
      for (size_t n : chain) color[n] = kBlack;
    }

    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      if (tree.nodes[i].parent == kNoParent) {
        tree.roots.push_back(i);
      } else {
        tree.nodes[tree.nodes[i].parent].children.push_back(i);
      }
    }
    // Deterministic child order regardless of input row order.
    for (auto& node : tree.nodes) {
      std::sort(node.children.begin(), node.children.end(),
                [&](size_t a, size_t b) {
                  const auto& sa = tree.nodes[a].span;
                  const auto& sb = tree.nodes[b].span;
                  return std::tie(sa.start_time, sa.span_id) <
                         std::tie(sb.start_time, sb.span_id);
                });
    }
    std::sort(tree.roots.begin(), tree.roots.end(), [&](size_t a, size_t b) {
      const auto& sa = tree.nodes[a].span;
      const auto& sb = tree.nodes[b].span;
      return std::tie(sa.start_time, sa.span_id) <
             std::tie(sb.start_time, sb.span_id);
    });

    // Depth assignment, breadth first from the roots.
    std::deque<size_t> queue(tree.roots.begin(), tree.roots.end());
    while (!queue.empty()) {
      size_t cur = queue.front();
      queue.pop_front();
      for (size_t child : tree.nodes[cur].children) {
        tree.nodes[child].depth = tree.nodes[cur].depth + 1;
        queue.push_back(child);
      }
    }

    forest.push_back(std::move(tree));
  }
  return forest;
}

TraceAnomalyReport detect_trace_anomalies(const std::vector<CallTree>& forest) {
  TraceAnomalyReport report;

  struct Agg {
    int count = 0;
    int max_depth = 0;
  };
  // (component, status) -> frontier occurrence counts.
  std::map<std::pair<ComponentId, int>, Agg> frontier;
  std::set<std::vector<std::string>> paths;
  // service -> pods of that service observed anywhere in the forest.
  std::map<std::string, std::set<std::string>> observed_pods;

  for (const auto& tree : forest) {
    for (const auto& w : tree.warnings) report.warnings.push_back(w);
    for (const auto& node : tree.nodes) {
      ComponentId id = component_of_span(node.span);
      if (id.level == ComponentLevel::Pod) {
        observed_pods[service_of_pod(id.name)].insert(id.name);
      }
    }
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const CallNode& node = tree.nodes[i];
      if (!node.is_anomalous) continue;
      bool anomalous_child = false;
      for (size_t child : node.children) {
        if (tree.nodes[child].is_anomalous) {
          anomalous_child = true;
          break;
        }
      }
      if (anomalous_child) continue;

      ComponentId id = component_of_span(node.span);
      Agg& agg = frontier[{id, effective_status(node.span)}];
      agg.count += 1;
      agg.max_depth = std::max(agg.max_depth, node.depth);

      std::vector<std::string> path;
      for (size_t cur = i; cur != kNoParent; cur = tree.nodes[cur].parent) {
        path.push_back(component_of_span(tree.nodes[cur].span).name);
      }
      std::reverse(path.begin(), path.end());
      paths.insert(std::move(path));
    }
  }

  for (const auto& [key, agg] : frontier) {
    report.anomalous_leaves.push_back({key.first, key.second, agg.count});
  }

  // Candidate aggregation across status codes.
  struct Candidate {
    ComponentId id;
    int count = 0;
    int max_depth = 0;
  };
  std::map<ComponentId, Candidate> candidates;
  for (const auto& [key, agg] : frontier) {
    Candidate& c = candidates[key.first];
    c.id = key.first;
    c.count += agg.count;
    c.max_depth = std::max(c.max_depth, agg.max_depth);
  }

  // Service escalation: every observed pod of the service is a candidate and
  // there are at least two of them.
  std::map<std::string, Candidate> escalated;
  for (const auto& [service, pods] : observed_pods) {
    if (pods.size() < 2) continue;
    Candidate svc;
    svc.id = {service, ComponentLevel::Service};
    bool all_candidates = true;
    for (const auto& pod : pods) {
      auto it = candidates.find({pod, ComponentLevel::Pod});
      if (it == candidates.end()) {
        all_candidates = false;
        break;
      }
      svc.count += it->second.count;
      svc.max_depth = std::max(svc.max_depth, it->second.max_depth);
    }
    if (all_candidates) escalated[service] = svc;
  }
  for (const auto& [service, svc] : escalated) {
    candidates[svc.id] = svc;
    // Give the escalated candidate propagation paths of its own: the pod
    // paths with the final hop generalized to the service.
    std::set<std::vector<std::string>> extra;
    for (const auto& path : paths) {
      if (path.empty()) continue;
      ComponentId last = classify_component(path.back());
      if (last.level == ComponentLevel::Pod &&
          service_of_pod(last.name) == service) {
        std::vector<std::string> generalized = path;
        generalized.back() = service;
        extra.insert(std::move(generalized));
      }
    }
    paths.insert(extra.begin(), extra.end());
  }

  std::vector<Candidate> ranked;
  ranked.reserve(candidates.size());
  for (const auto& [id, c] : candidates) ranked.push_back(c);
  std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.max_depth != b.max_depth) return a.max_depth > b.max_depth;
    return a.id.name < b.id.name;
  });
  for (const auto& c : ranked) {
    report.candidate_components.push_back(c.id);
    report.candidate_error_counts[c.id.name] = c.count;
  }
  report.propagation_paths.assign(paths.begin(), paths.end());
  return report;
}

std::string render_tree(const CallTree& tree) {
  std::string out = "trace " + tree.trace_id + "\n";
  // (node, indent) worklist, children pushed in reverse to keep their order.
  std::vector<std::pair<size_t, int>> stack;
  for (auto it = tree.roots.rbegin(); it != tree.roots.rend(); ++it) {
    stack.push_back({*it, 0});
  }
  while (!stack.empty()) {
    auto [idx, indent] = stack.back();
    stack.pop_back();
    const CallNode& node = tree.nodes[idx];
    out.append(static_cast<size_t>(indent) * 2, ' ');
    out += component_of_span(node.span).name;
    const int status = effective_status(node.span);
    if (status != 0) out += " [status " + std::to_string(status) + "]";
    out += "\n";
    for (auto it = node.children.rbegin(); it != node.children.rend(); ++it) {
      stack.push_back({*it, indent + 1});
    }
  }
  return out;
}

}  // namespace orca

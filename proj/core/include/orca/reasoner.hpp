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

#include "orca/errors.hpp"
#include "orca/fusion.hpp"

namespace orca {

struct ReasoningStep {
  int step = 0;  // 1-based, contiguous
  std::string action;
  std::string observation;

  bool operator==(const ReasoningStep& o) const {
    return step == o.step && action == o.action && observation == o.observation;
  }
};

struct Diagnosis {
  std::string component;  // normalized: trimmed, lower-case, no whitespace
  std::string reason;
  std::vector<ReasoningStep> reasoning_trace;
};

enum class BackendKind { HttpChat, Mock };

std::string_view backend_kind_name(BackendKind kind);
BackendKind backend_kind_from_name(const std::string& name);

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  // http_chat only; plain-http chat-completions endpoint.
  std::string endpoint;
  std::string model_name = "default";
  double temperature = 0.0;
  int max_retries = 2;
  double timeout_s = 30.0;
  // Name of the environment variable holding the bearer token. The key
  // itself never appears in config files.
  std::string api_key_env = "ORCA_API_KEY";

  void validate() const;
};

// Deterministic chat prompt: role framing, serialized evidence and the reply
// schema. Throws Error(NoEvidence) when the context carries nothing.
std::string build_prompt(const EvidenceContext& ctx, const FusionConfig& fusion);

// One chat-completion round trip; returns the assistant message text.
// Retries connection failures, timeouts and 5xx with exponential backoff up
// to max_retries, then throws Error(BackendTimeout) or
// Error(BackendHTTPError) carrying the status and a body excerpt.
std::string infer(const BackendConfig& cfg, const std::string& prompt);

// Deterministic reasoner used for tests, fixtures and offline runs: picks
// the top bundle and fabricates the tool-call trace an interactive
// diagnosis would produce.
Diagnosis mock_reason(const EvidenceContext& ctx);

// Extracts the first JSON object from a model reply (prose and code fences
// tolerated), validates the schema and normalizes the component. Never
// throws: malformed input yields ErrorCode::MalformedOutput or
// ErrorCode::SchemaViolation.
Result<Diagnosis> parse_diagnosis(const std::string& raw);

// Full reasoning round: mock backends answer locally; http_chat backends
// get build_prompt -> infer -> parse_diagnosis with one repair prompt
// before the parse error propagates.
Diagnosis diagnose(const EvidenceContext& ctx, const FusionConfig& fusion,
                   const BackendConfig& backend);

}  // namespace orca

// Copyright 2026 The Phenorag Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHENORAG_HTTP_BACKEND_HPP_
#define PHENORAG_HTTP_BACKEND_HPP_

#include <memory>
#include <string>

#include "phenorag/llm_client.hpp"
#include "phenorag/mock_backend.hpp"

namespace phenorag {

// Maps the pipeline's request onto an endpoint's JSON shape. The default
// body is {"prompt", "max_output_tokens", "temperature"} and the completion
// text is read from "/text".
struct HttpAdapter {
  std::string prompt_field = "prompt";
  std::string max_tokens_field = "max_output_tokens";
  std::string temperature_field = "temperature";
  // JSON pointer to the completion text in the response body.
  std::string response_pointer = "/text";
  // JSON object merged into every request body (e.g. a model name).
  std::string extra_body = "{}";

  friend bool operator==(const HttpAdapter&, const HttpAdapter&) = default;
};

struct HttpConfig {
  std::string endpoint;  // http://host[:port]/path
  // Name of the environment variable holding a bearer token; empty for
  // unauthenticated endpoints. The credential itself never appears in
  // configuration files.
  std::string credential_env;
  double timeout_seconds = 60.0;
  HttpAdapter adapter;

  friend bool operator==(const HttpConfig&, const HttpConfig&) = default;
};

// POSTs JSON to a completion endpoint. Connection failures and 408/429/5xx
// raise retryable BackendErrors; other non-2xx statuses and malformed bodies
// are not retryable.
class HttpBackend : public CompletionBackend {
 public:
  // Throws ConfigError for an unusable endpoint, a bad adapter or a missing
  // credential variable.
  explicit HttpBackend(HttpConfig config);
  ~HttpBackend() override;

  std::string Complete(const CompletionRequest& req) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class BackendKind { kMock, kHttp };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  MockConfig mock = SyntheticOracleConfig();
  HttpConfig http;
  ClientOptions client;
  GenerationParams generation;

  friend bool operator==(const BackendConfig&, const BackendConfig&) = default;
};

// Builds and validates the backend before any request is made.
std::shared_ptr<LlmClient> MakeClient(const BackendConfig& config);

}  // namespace phenorag

#endif  // PHENORAG_HTTP_BACKEND_HPP_

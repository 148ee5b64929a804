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

#include "phenorag/http_backend.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "phenorag/error.hpp"

namespace phenorag {
namespace {

using json = nlohmann::json;

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl ParseEndpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind("https://", 0) == 0) {
    // TODO: build httplib with CPPHTTPLIB_OPENSSL_SUPPORT to allow https.
    throw ConfigError("backend.http.endpoint: https is not supported by this "
                      "build; use a local http proxy");
  }
  if (url.rfind(scheme, 0) != 0) {
    throw ConfigError("backend.http.endpoint must start with http://");
  }
  const std::size_t slash = url.find('/', scheme.size());
  ParsedUrl out;
  out.origin = url.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (out.origin.size() <= scheme.size()) {
    throw ConfigError("backend.http.endpoint has no host");
  }
  return out;
}

bool RetryableStatus(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

struct HttpBackend::Impl {
  HttpConfig config;
  ParsedUrl url;
  std::string credential;
  json extra_body;
  json::json_pointer response_pointer;
};

HttpBackend::HttpBackend(HttpConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
  impl_->url = ParseEndpoint(impl_->config.endpoint);
  if (!impl_->config.credential_env.empty()) {
    const char* value = std::getenv(impl_->config.credential_env.c_str());
    if (value == nullptr || *value == '\0') {
      throw ConfigError("backend credential variable " +
                        impl_->config.credential_env + " is not set");
    }
    impl_->credential = value;
  }
  try {
    impl_->extra_body = json::parse(impl_->config.adapter.extra_body);
    impl_->response_pointer =
        json::json_pointer(impl_->config.adapter.response_pointer);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("backend.http.adapter: ") + e.what());
  }
  if (!impl_->extra_body.is_object()) {
    throw ConfigError("backend.http.adapter.extra_body must be a JSON object");
  }
  if (!(impl_->config.timeout_seconds > 0)) {
    throw ConfigError("backend.http.timeout_seconds must be > 0");
  }
}

HttpBackend::~HttpBackend() = default;

std::string HttpBackend::Complete(const CompletionRequest& req) {
  const auto& adapter = impl_->config.adapter;
  json body = impl_->extra_body;
  body[adapter.prompt_field] = req.prompt;
  if (!adapter.max_tokens_field.empty()) {
    body[adapter.max_tokens_field] = req.max_output_tokens;
  }
  if (!adapter.temperature_field.empty()) {
    body[adapter.temperature_field] = req.temperature;
  }

  // httplib::Client is not safe for concurrent use; one per request.
  httplib::Client client(impl_->url.origin);
  const auto timeout = std::chrono::duration<double>(
      impl_->config.timeout_seconds);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!impl_->credential.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->credential);
  }

  auto res = client.Post(impl_->url.path, headers, body.dump(),
                         "application/json");
  if (!res) {
    throw BackendError("POST " + impl_->config.endpoint + " failed: " +
                           httplib::to_string(res.error()),
                       /*retryable=*/true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("POST " + impl_->config.endpoint + " returned HTTP " +
                           std::to_string(res->status),
                       RetryableStatus(res->status));
  }
  try {
    const json parsed = json::parse(res->body);
    const json& text = parsed.at(impl_->response_pointer);
    if (!text.is_string()) {
      throw BackendError("completion field " + adapter.response_pointer +
                             " is not a string",
                         false);
    }
    return text.get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed completion response: ") +
                           e.what(),
                       false);
  }
}

std::shared_ptr<LlmClient> MakeClient(const BackendConfig& config) {
  std::shared_ptr<CompletionBackend> backend;
  if (config.kind == BackendKind::kMock) {
    backend = std::make_shared<MockBackend>(config.mock);
  } else {
    backend = std::make_shared<HttpBackend>(config.http);
  }
  return std::make_shared<LlmClient>(std::move(backend), config.client);
}

}  // namespace phenorag

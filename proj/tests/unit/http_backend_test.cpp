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

#include <gtest/gtest.h>
#include <stdlib.h>

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "phenorag/error.hpp"
#include "test_support.hpp"

namespace phenorag {
namespace {

using namespace std::chrono_literals;
using json = nlohmann::json;

// In-process completion server on an ephemeral port.
class FakeServer {
 public:
  using Handler = std::function<void(const httplib::Request&,
                                     httplib::Response&, int call)>;
  explicit FakeServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/complete",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   handler_(req, res, calls_++);
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/complete";
  }
  int calls() const { return calls_; }

 private:
  Handler handler_;
  httplib::Server server_;
  std::atomic<int> calls_{0};
  int port_ = 0;
  std::thread thread_;
};

ClientOptions FastRetry(int attempts) {
  ClientOptions o;
  o.retry.max_attempts = attempts;
  o.retry.backoff_base = 1ms;
  return o;
}

TEST(HttpBackendTest, RetryableFailuresThenSuccess) {
  FakeServer server([](const httplib::Request& req, httplib::Response& res,
                       int call) {
    if (call < 2) {
      res.status = 503;
      return;
    }
    const json body = json::parse(req.body);
    res.set_content(json{{"text", "echo: " + body.at("prompt").get<std::string>()}}
                        .dump(),
                    "application/json");
  });
  HttpConfig cfg;
  cfg.endpoint = server.endpoint();
  LlmClient client(std::make_shared<HttpBackend>(cfg), FastRetry(3));
  EXPECT_EQ(client.Complete(CompletionRequest{"hi", 8, 0.0}), "echo: hi");
  EXPECT_EQ(server.calls(), 3);
  EXPECT_EQ(client.stats().attempts, 3u);
}

TEST(HttpBackendTest, ClientErrorIsNotRetried) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) {
    res.status = 400;
  });
  HttpConfig cfg;
  cfg.endpoint = server.endpoint();
  LlmClient client(std::make_shared<HttpBackend>(cfg), FastRetry(5));
  try {
    client.Complete(CompletionRequest{"hi", 8, 0.0});
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_FALSE(e.retryable());
    EXPECT_EQ(e.attempts(), 1);
  }
  EXPECT_EQ(server.calls(), 1);
}

TEST(HttpBackendTest, AdapterShapesRequestAndResponse) {
  std::string seen_auth;
  json seen_body;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res,
                        int) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = json::parse(req.body);
    res.set_content(R"({"choices":[{"text":"Answer: yes"}]})",
                    "application/json");
  });
  ::setenv("PHENORAG_TEST_TOKEN", "s3cret", 1);
  HttpConfig cfg;
  cfg.endpoint = server.endpoint();
  cfg.credential_env = "PHENORAG_TEST_TOKEN";
  cfg.adapter.prompt_field = "input";
  cfg.adapter.max_tokens_field = "max_tokens";
  cfg.adapter.temperature_field = "";
  cfg.adapter.response_pointer = "/choices/0/text";
  cfg.adapter.extra_body = R"({"model":"m1"})";
  HttpBackend backend(cfg);
  EXPECT_EQ(backend.Complete(CompletionRequest{"q", 32, 0.5}), "Answer: yes");
  EXPECT_EQ(seen_auth, "Bearer s3cret");
  EXPECT_EQ(seen_body,
            (json{{"input", "q"}, {"max_tokens", 32}, {"model", "m1"}}));
  ::unsetenv("PHENORAG_TEST_TOKEN");
}

TEST(HttpBackendTest, MalformedResponseIsNotRetryable) {
  FakeServer server([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content("not json", "text/plain");
  });
  HttpConfig cfg;
  cfg.endpoint = server.endpoint();
  HttpBackend backend(cfg);
  try {
    backend.Complete(CompletionRequest{"q", 8, 0.0});
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_FALSE(e.retryable());
  }
}

TEST(HttpBackendTest, UnreachableServerIsRetryable) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/x";
  cfg.timeout_seconds = 2;
  HttpBackend backend(cfg);
  try {
    backend.Complete(CompletionRequest{"q", 8, 0.0});
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_TRUE(e.retryable());
  }
}

TEST(HttpBackendTest, ConfigurationErrors) {
  HttpConfig cfg;
  cfg.endpoint = "https://example.invalid/v1";
  EXPECT_THROW(HttpBackend{cfg}, ConfigError);
  cfg.endpoint = "ftp://example.invalid/";
  EXPECT_THROW(HttpBackend{cfg}, ConfigError);
  cfg.endpoint = "http://127.0.0.1:1/x";
  cfg.credential_env = "PHENORAG_TEST_SURELY_UNSET_VARIABLE";
  ::unsetenv(cfg.credential_env.c_str());
  EXPECT_THROW(HttpBackend{cfg}, ConfigError);
  cfg.credential_env.clear();
  cfg.adapter.extra_body = "[1]";
  EXPECT_THROW(HttpBackend{cfg}, ConfigError);
  cfg.adapter.extra_body = "{}";
  cfg.timeout_seconds = 0;
  EXPECT_THROW(HttpBackend{cfg}, ConfigError);
}

TEST(MakeClientTest, BuildsMockOrFailsEarly) {
  BackendConfig cfg;
  auto client = MakeClient(cfg);
  EXPECT_EQ(client->Complete(CompletionRequest{"Diagnosis: PAH", 8, 0.0}),
            kMockPositive);
  cfg.kind = BackendKind::kHttp;
  cfg.http.endpoint = "http://127.0.0.1:1/x";
  cfg.http.credential_env = "PHENORAG_TEST_SURELY_UNSET_VARIABLE";
  EXPECT_THROW(MakeClient(cfg), ConfigError);
}

}  // namespace
}  // namespace phenorag

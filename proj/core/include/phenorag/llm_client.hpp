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

#ifndef PHENORAG_LLM_CLIENT_HPP_
#define PHENORAG_LLM_CLIENT_HPP_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

namespace phenorag {

struct CompletionRequest {
  std::string prompt;
  std::size_t max_output_tokens = 512;
  double temperature = 0.0;
};

// Per-request decoding settings applied by the pipeline.
struct GenerationParams {
  std::size_t max_output_tokens = 512;
  double temperature = 0.0;

  friend bool operator==(const GenerationParams&,
                         const GenerationParams&) = default;
};

inline CompletionRequest MakeRequest(std::string prompt,
                                     const GenerationParams& params) {
  return CompletionRequest{std::move(prompt), params.max_output_tokens,
                           params.temperature};
}

// Throws InvalidArgument for an empty prompt or negative temperature.
void ValidateRequest(const CompletionRequest& req);

// A text completion service. Implementations throw BackendError; the
// `retryable` flag decides whether LlmClient tries again.
class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  virtual std::string Complete(const CompletionRequest& req) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  // Delay before retry k (1-based) is backoff_base * 2^(k-1).
  std::chrono::milliseconds backoff_base{200};

  friend bool operator==(const RetryPolicy&, const RetryPolicy&) = default;
};

struct RateLimit {
  // Zero disables rate limiting.
  double requests_per_second = 0.0;
  // Bucket capacity; at least one request.
  double burst = 1.0;

  friend bool operator==(const RateLimit&, const RateLimit&) = default;
};

struct ClientOptions {
  std::size_t max_concurrency = 8;
  RetryPolicy retry;
  RateLimit rate_limit;

  friend bool operator==(const ClientOptions&, const ClientOptions&) = default;
};

// Injection points for time, so limiter and retry tests run without real
// sleeps.
struct ClientClock {
  std::function<std::chrono::steady_clock::time_point()> now;
  std::function<void(std::chrono::steady_clock::duration)> sleep;

  static ClientClock Real();
};

// Token bucket: admits at most `burst` requests at once and refills at
// `requests_per_second`. Thread-safe.
class TokenBucket {
 public:
  TokenBucket(RateLimit limit, ClientClock clock);
  void Acquire();

 private:
  RateLimit limit_;
  ClientClock clock_;
  std::mutex mu_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct ClientStats {
  std::size_t requests = 0;   // Complete() calls
  std::size_t attempts = 0;   // backend invocations
  std::size_t failures = 0;   // Complete() calls that threw
  std::size_t peak_in_flight = 0;
  std::size_t prompt_tokens = 0;    // whitespace tokens sent
  std::size_t response_tokens = 0;  // whitespace tokens received
};

// Shared front end over a backend: bounded concurrency, rate limiting and
// retries. Safe to call from any number of threads; callers beyond
// max_concurrency block until a slot frees.
class LlmClient {
 public:
  // Throws ConfigError when max_concurrency is 0 or max_attempts < 1.
  LlmClient(std::shared_ptr<CompletionBackend> backend, ClientOptions options,
            ClientClock clock = ClientClock::Real());

  // Throws BackendError carrying the number of attempts made.
  std::string Complete(const CompletionRequest& req);

  const ClientOptions& options() const noexcept { return options_; }
  ClientStats stats() const;

 private:
  void AcquireSlot();
  void ReleaseSlot();

  std::shared_ptr<CompletionBackend> backend_;
  ClientOptions options_;
  ClientClock clock_;
  TokenBucket bucket_;

  mutable std::mutex mu_;
  std::condition_variable slot_freed_;
  std::size_t in_flight_ = 0;
  ClientStats stats_;
};

}  // namespace phenorag

#endif  // PHENORAG_LLM_CLIENT_HPP_

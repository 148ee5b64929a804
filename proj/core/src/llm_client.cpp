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

#include "phenorag/llm_client.hpp"

#include <algorithm>
#include <thread>

#include "phenorag/error.hpp"
#include "phenorag/text.hpp"

namespace phenorag {

void ValidateRequest(const CompletionRequest& req) {
  if (req.prompt.empty()) throw InvalidArgument("completion prompt is empty");
  if (!(req.temperature >= 0.0)) {
    throw InvalidArgument("completion temperature must be >= 0");
  }
}

ClientClock ClientClock::Real() {
  return ClientClock{
      [] { return std::chrono::steady_clock::now(); },
      [](std::chrono::steady_clock::duration d) {
        std::this_thread::sleep_for(d);
      }};
}

TokenBucket::TokenBucket(RateLimit limit, ClientClock clock)
    : limit_(limit), clock_(std::move(clock)) {
  limit_.burst = std::max(1.0, limit_.burst);
  tokens_ = limit_.burst;
  last_ = clock_.now();
}

void TokenBucket::Acquire() {
  if (limit_.requests_per_second <= 0.0) return;
  using Seconds = std::chrono::duration<double>;
  for (;;) {
    std::chrono::steady_clock::duration wait{};
    {
      std::lock_guard lock(mu_);
      const auto now = clock_.now();
      const double elapsed = Seconds(now - last_).count();
      last_ = now;
      tokens_ = std::min(limit_.burst,
                         tokens_ + elapsed * limit_.requests_per_second);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          Seconds((1.0 - tokens_) / limit_.requests_per_second));
      if (wait <= std::chrono::steady_clock::duration::zero()) {
        wait = std::chrono::steady_clock::duration(1);
      }
    }
    clock_.sleep(wait);
  }
}

LlmClient::LlmClient(std::shared_ptr<CompletionBackend> backend,
                     ClientOptions options, ClientClock clock)
    : backend_(std::move(backend)),
      options_(options),
      clock_(clock),
      bucket_(options.rate_limit, clock) {
  if (!backend_) throw ConfigError("LLM client has no backend");
  if (options_.max_concurrency == 0) {
    throw ConfigError("backend.max_concurrency must be >= 1");
  }
  if (options_.retry.max_attempts < 1) {
    throw ConfigError("backend.retry.max_attempts must be >= 1");
  }
  if (options_.rate_limit.requests_per_second < 0.0) {
    throw ConfigError("backend.rate_limit.requests_per_second must be >= 0");
  }
}

void LlmClient::AcquireSlot() {
  std::unique_lock lock(mu_);
  slot_freed_.wait(lock,
                   [&] { return in_flight_ < options_.max_concurrency; });
  ++in_flight_;
  ++stats_.attempts;
  stats_.peak_in_flight = std::max(stats_.peak_in_flight, in_flight_);
}

void LlmClient::ReleaseSlot() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  slot_freed_.notify_one();
}

std::string LlmClient::Complete(const CompletionRequest& req) {
  ValidateRequest(req);
  {
    std::lock_guard lock(mu_);
    ++stats_.requests;
    stats_.prompt_tokens += CountWhitespaceTokens(req.prompt);
  }
  for (int attempt = 1;; ++attempt) {
    bucket_.Acquire();
    AcquireSlot();
    try {
      std::string out = backend_->Complete(req);
      ReleaseSlot();
      std::lock_guard lock(mu_);
      stats_.response_tokens += CountWhitespaceTokens(out);
      return out;
    } catch (const BackendError& e) {
      ReleaseSlot();
      if (!e.retryable() || attempt >= options_.retry.max_attempts) {
        {
          std::lock_guard lock(mu_);
          ++stats_.failures;
        }
        throw BackendError(e.what(), e.retryable(), attempt);
      }
    } catch (...) {
      ReleaseSlot();
      std::lock_guard lock(mu_);
      ++stats_.failures;
      throw;
    }
    clock_.sleep(options_.retry.backoff_base * (1LL << std::min(attempt - 1, 16)));
  }
}

ClientStats LlmClient::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

}  // namespace phenorag

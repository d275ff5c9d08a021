#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/costs.hpp"
#include "sensebench/detail/digest.hpp"
#include "sensebench/detail/io.hpp"
#include "sensebench/detail/rng.hpp"
#include "sensebench/errors.hpp"

namespace sensebench {

class GatewayError : public Error {
 public:
  using Error::Error;
};

/// Missing or rejected credentials; never retried.
class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// The provider rejected the request in a way retrying cannot fix
/// (4xx other than 429, malformed response body).
class PermanentProviderError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// Rate limits, 5xx, timeouts, connection failures — worth retrying.
class TransientProviderError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

/// Transient failures persisted past the attempt cap.
class RetriesExhaustedError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

struct ModelParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;

  bool operator==(const ModelParams&) const = default;
};

/// `provider:model_name` plus sampling parameters.
struct ModelRef {
  std::string provider;
  std::string model_name;
  ModelParams params;

  static ModelRef parse(std::string_view text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
      throw ConfigError("model must be given as provider:model_name, got '" +
                        std::string(text) + "'");
    }
    ModelRef ref;
    ref.provider = std::string(text.substr(0, colon));
    ref.model_name = std::string(text.substr(colon + 1));
    return ref;
  }

  std::string str() const { return provider + ":" + model_name; }
};

struct Completion {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  bool cached = false;
  std::chrono::milliseconds latency{0};
};

/// What a provider hands back before caching/accounting.
struct ProviderReply {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string name() const = 0;
  /// Throws AuthError / PermanentProviderError / TransientProviderError.
  virtual ProviderReply complete(const std::string& model, const std::string& system,
                                 const std::string& user, const ModelParams& params) = 0;
};

struct ProviderLimits {
  int max_attempts = 5;
  int base_backoff_ms = 500;
  int max_backoff_ms = 30000;
  int max_concurrent = 4;
};

namespace detail {

/// Runtime-capped counting semaphore (std::counting_semaphore fixes its
/// ceiling at compile time).
class Semaphore {
 public:
  explicit Semaphore(int count) : count_(count) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return count_ > 0; });
    --count_;
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      ++count_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int count_;
};

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(Semaphore& sem) : sem_(sem) { sem_.acquire(); }
  ~SemaphoreGuard() { sem_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  Semaphore& sem_;
};

}  // namespace detail

/// Deterministic offline provider. Replies are scripted against a digest
/// of (system, user); unscripted prompts get the default reply. Also
/// instruments call counts and peak concurrency so tests can assert the
/// gateway's caps, and can fail on demand to exercise the retry path.
class MockProvider : public Provider {
 public:
  struct Reply {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
  };

  explicit MockProvider(std::string name = "mock") : name_(std::move(name)) {}

  std::string name() const override { return name_; }

  static std::string key(const std::string& system, const std::string& user) {
    return detail::sha256_hex(std::to_string(system.size()) + ":" + system + "\n" +
                              std::to_string(user.size()) + ":" + user);
  }

  void script(const std::string& system, const std::string& user, Reply reply) {
    std::lock_guard lock(mu_);
    script_.emplace(key(system, user), std::move(reply));
  }

  void set_default_reply(Reply reply) {
    std::lock_guard lock(mu_);
    default_reply_ = std::move(reply);
  }

  /// The next `n` calls throw TransientProviderError before any reply.
  void fail_times(int n) {
    std::lock_guard lock(mu_);
    failures_remaining_ = n;
  }

  /// Holds each call open, letting tests observe in-flight concurrency.
  void set_hold(std::chrono::milliseconds hold) {
    std::lock_guard lock(mu_);
    hold_ = hold;
  }

  int call_count() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

  int max_observed_concurrency() const {
    std::lock_guard lock(mu_);
    return max_in_flight_;
  }

  ProviderReply complete(const std::string&, const std::string& system,
                         const std::string& user, const ModelParams&) override {
    std::chrono::milliseconds hold{0};
    Reply reply;
    {
      std::lock_guard lock(mu_);
      ++calls_;
      ++in_flight_;
      max_in_flight_ = std::max(max_in_flight_, in_flight_);
      if (failures_remaining_ > 0) {
        --failures_remaining_;
        --in_flight_;
        throw TransientProviderError("scripted transient failure");
      }
      hold = hold_;
      const auto it = script_.find(key(system, user));
      reply = it != script_.end() ? it->second : default_reply_;
    }
    if (hold.count() > 0) std::this_thread::sleep_for(hold);
    std::lock_guard lock(mu_);
    --in_flight_;
    return {reply.text, reply.prompt_tokens, reply.completion_tokens};
  }

 private:
  std::string name_;
  mutable std::mutex mu_;
  std::map<std::string, Reply> script_;
  Reply default_reply_{"0", 0, 0};
  int failures_remaining_ = 0;
  std::chrono::milliseconds hold_{0};
  int calls_ = 0;
  int in_flight_ = 0;
  int max_in_flight_ = 0;
};

/// Shared-safe front end: disk cache, retry with exponential backoff and
/// jitter, per-provider concurrency caps, and spend accounting. Cache hits
/// cost nothing and add no ledger entries.
class CompletionGateway {
 public:
  CompletionGateway() = default;
  CompletionGateway(const CompletionGateway&) = delete;
  CompletionGateway& operator=(const CompletionGateway&) = delete;

  void register_provider(std::shared_ptr<Provider> provider, ProviderLimits limits = {}) {
    if (!provider) throw ConfigError("null provider");
    const std::string name = provider->name();
    std::lock_guard lock(mu_);
    if (providers_.contains(name)) {
      throw ConfigError("provider '" + name + "' registered twice");
    }
    auto entry = std::make_unique<Entry>();
    entry->provider = std::move(provider);
    entry->limits = limits;
    entry->semaphore = std::make_unique<detail::Semaphore>(
        std::max(1, limits.max_concurrent));
    providers_.emplace(name, std::move(entry));
  }

  void set_cache_dir(const std::filesystem::path& dir) {
    std::lock_guard lock(mu_);
    cache_dir_ = dir;
    std::filesystem::create_directories(dir);
  }

  void set_price_table(PriceTable table) {
    std::lock_guard lock(mu_);
    prices_ = std::move(table);
  }

  const PriceTable& price_table() const { return prices_; }
  CostLedger& ledger() { return ledger_; }
  const CostLedger& ledger() const { return ledger_; }

  static std::string cache_key(const ModelRef& model, const std::string& system,
                               const std::string& user) {
    // Serialized as JSON so no concatenation of fields can collide.
    const nlohmann::json key = {
        {"provider", model.provider},
        {"model", model.model_name},
        {"temperature", model.params.temperature},
        {"max_output_tokens", model.params.max_output_tokens},
        {"system", system},
        {"user", user},
    };
    return detail::sha256_hex(key.dump());
  }

  Completion complete(const ModelRef& model, const std::string& system,
                      const std::string& user) {
    Entry* entry = nullptr;
    std::optional<std::filesystem::path> cache_path;
    {
      std::lock_guard lock(mu_);
      const auto it = providers_.find(model.provider);
      if (it == providers_.end()) {
        throw ConfigError("unknown provider '" + model.provider + "'");
      }
      entry = it->second.get();
      if (cache_dir_) {
        const std::string key = cache_key(model, system, user);
        cache_path = *cache_dir_ / key.substr(0, 2) / (key + ".json");
      }
    }

    if (cache_path) {
      if (std::optional<Completion> hit = cache_get(*cache_path)) return *hit;
    }

    const auto started = std::chrono::steady_clock::now();
    ProviderReply reply;
    {
      detail::SemaphoreGuard guard(*entry->semaphore);
      reply = call_with_retries(*entry, model, system, user);
    }
    Completion completion;
    completion.text = reply.text;
    completion.prompt_tokens = reply.prompt_tokens;
    completion.completion_tokens = reply.completion_tokens;
    completion.cached = false;
    completion.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    CostRecord record;
    record.model = model.model_name;
    record.prompt_tokens = reply.prompt_tokens;
    record.completion_tokens = reply.completion_tokens;
    const std::optional<ModelPrice> price = prices_.find(model.model_name);
    record.dollars = price ? price->dollars(reply.prompt_tokens, reply.completion_tokens) : 0.0;
    ledger_.add(std::move(record));

    if (cache_path) cache_put(*cache_path, model, reply);
    return completion;
  }

 private:
  struct Entry {
    std::shared_ptr<Provider> provider;
    ProviderLimits limits;
    std::unique_ptr<detail::Semaphore> semaphore;
  };

  ProviderReply call_with_retries(Entry& entry, const ModelRef& model,
                                  const std::string& system, const std::string& user) {
    detail::SplitMix64 jitter(static_cast<std::uint64_t>(
        std::chrono::steady_clock::now().time_since_epoch().count()));
    std::string last_error;
    for (int attempt = 1; attempt <= entry.limits.max_attempts; ++attempt) {
      try {
        return entry.provider->complete(model.model_name, system, user, model.params);
      } catch (const TransientProviderError& e) {
        last_error = e.what();
        if (attempt == entry.limits.max_attempts) break;
        const double base = static_cast<double>(entry.limits.base_backoff_ms) *
                            static_cast<double>(1 << std::min(attempt - 1, 20));
        const double capped = std::min(base, static_cast<double>(entry.limits.max_backoff_ms));
        const auto delay = std::chrono::milliseconds(
            static_cast<std::int64_t>(capped * (0.5 + 0.5 * jitter.unit())));
        std::this_thread::sleep_for(delay);
      }
    }
    throw RetriesExhaustedError("provider '" + model.provider + "' failed " +
                                std::to_string(entry.limits.max_attempts) +
                                " attempts; last error: " + last_error);
  }

  std::optional<Completion> cache_get(const std::filesystem::path& path) const {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    try {
      const nlohmann::json j = nlohmann::json::parse(detail::read_file(path));
      Completion completion;
      completion.text = j.at("text").get<std::string>();
      completion.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
      completion.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
      completion.cached = true;
      return completion;
    } catch (const std::exception& e) {
      std::cerr << "warning: ignoring corrupt cache entry " << path << ": " << e.what()
                << '\n';
      return std::nullopt;
    }
  }

  void cache_put(const std::filesystem::path& path, const ModelRef& model,
                 const ProviderReply& reply) const {
    const nlohmann::json j = {
        {"provider", model.provider},
        {"model", model.model_name},
        {"temperature", model.params.temperature},
        {"max_output_tokens", model.params.max_output_tokens},
        {"text", reply.text},
        {"prompt_tokens", reply.prompt_tokens},
        {"completion_tokens", reply.completion_tokens},
    };
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    detail::write_file_atomic(path, j.dump() + "\n");
  }

  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Entry>> providers_;
  std::optional<std::filesystem::path> cache_dir_;
  PriceTable prices_;
  CostLedger ledger_;
};

}  // namespace sensebench

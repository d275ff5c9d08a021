#pragma once

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "sensebench/detail/io.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/gateway.hpp"

namespace sensebench {

struct HttpProviderOptions {
  std::string name;
  std::string base_url;  // scheme://host[:port][/path-prefix]
  /// Environment variable holding the bearer token; defaults to
  /// <NAME>_API_KEY. An explicit api_key wins over the environment.
  std::string api_key_env;
  std::string api_key;
  bool requires_api_key = true;  // local servers typically take no token
  std::string chat_path = "/chat/completions";
  int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client. A fresh httplib client per
/// request keeps the provider shared-safe; connection reuse matters far
/// less than the model latency here.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderOptions options) : options_(std::move(options)) {
    if (options_.name.empty()) throw ConfigError("provider needs a name");
    const std::size_t scheme = options_.base_url.find("://");
    if (scheme == std::string::npos) {
      throw ConfigError("provider '" + options_.name +
                        "' base_url needs a scheme: " + options_.base_url);
    }
    const std::size_t path = options_.base_url.find('/', scheme + 3);
    if (path == std::string::npos) {
      origin_ = options_.base_url;
    } else {
      origin_ = options_.base_url.substr(0, path);
      path_prefix_ = options_.base_url.substr(path);
      while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    }
    if (options_.api_key_env.empty()) {
      std::string env;
      for (const char c : options_.name) {
        env += static_cast<char>(c >= 'a' && c <= 'z' ? c - 0x20 : c);
      }
      options_.api_key_env = env + "_API_KEY";
    }
  }

  std::string name() const override { return options_.name; }

  ProviderReply complete(const std::string& model, const std::string& system,
                         const std::string& user, const ModelParams& params) override {
    const std::string key = api_key();
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    client.set_write_timeout(options_.timeout_seconds, 0);

    httplib::Headers headers;
    if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

    const nlohmann::json body = {
        {"model", model},
        {"temperature", params.temperature},
        {"max_tokens", params.max_output_tokens},
        {"messages",
         {{{"role", "system"}, {"content", system}},
          {{"role", "user"}, {"content", user}}}},
    };
    const httplib::Result res =
        client.Post(path_prefix_ + options_.chat_path, headers, body.dump(),
                    "application/json");
    if (!res) {
      throw TransientProviderError("provider '" + options_.name + "': " +
                                   httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("provider '" + options_.name + "' rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      throw TransientProviderError("provider '" + options_.name + "' returned HTTP " +
                                   std::to_string(res->status));
    }
    if (res->status != 200) {
      throw PermanentProviderError("provider '" + options_.name + "' returned HTTP " +
                                   std::to_string(res->status) + ": " + res->body);
    }
    return parse_reply(res->body);
  }

 private:
  std::string api_key() const {
    if (!options_.api_key.empty()) return options_.api_key;
    if (const char* env = std::getenv(options_.api_key_env.c_str());
        env != nullptr && *env != '\0') {
      return env;
    }
    if (options_.requires_api_key) {
      throw AuthError("provider '" + options_.name + "' needs " +
                      options_.api_key_env + " in the environment");
    }
    return {};
  }

  ProviderReply parse_reply(const std::string& body) const {
    try {
      const nlohmann::json j = nlohmann::json::parse(body);
      ProviderReply reply;
      reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage") && j.at("usage").is_object()) {
        const auto& usage = j.at("usage");
        reply.prompt_tokens = usage.value("prompt_tokens", std::int64_t{0});
        reply.completion_tokens = usage.value("completion_tokens", std::int64_t{0});
      }
      return reply;
    } catch (const nlohmann::json::exception& e) {
      throw PermanentProviderError("provider '" + options_.name +
                                   "' sent an unreadable response: " + e.what());
    }
  }

  HttpProviderOptions options_;
  std::string origin_;
  std::string path_prefix_;
};

struct ProviderConfig {
  HttpProviderOptions options;
  ProviderLimits limits;
};

/// Reads the provider declarations config (names, endpoints, caps).
inline std::vector<ProviderConfig> load_provider_configs(
    const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("providers") || !j.at("providers").is_array()) {
    throw ConfigError(path.string() + ": expected an object with a \"providers\" array");
  }
  std::vector<ProviderConfig> configs;
  for (const auto& p : j.at("providers")) {
    ProviderConfig config;
    config.options.name = p.at("name").get<std::string>();
    config.options.base_url = p.at("base_url").get<std::string>();
    config.options.api_key_env = p.value("api_key_env", "");
    config.options.requires_api_key = p.value("requires_api_key", true);
    config.options.chat_path = p.value("chat_path", std::string("/chat/completions"));
    config.options.timeout_seconds = p.value("timeout_seconds", 120);
    config.limits.max_attempts = p.value("max_attempts", 5);
    config.limits.base_backoff_ms = p.value("base_backoff_ms", 500);
    config.limits.max_backoff_ms = p.value("max_backoff_ms", 30000);
    config.limits.max_concurrent = p.value("max_concurrent", 4);
    configs.push_back(std::move(config));
  }
  return configs;
}

}  // namespace sensebench

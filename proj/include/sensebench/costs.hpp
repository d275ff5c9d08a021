#pragma once

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/detail/io.hpp"
#include "sensebench/errors.hpp"

namespace sensebench {

/// Dollars per single token, quoted separately for prompt and completion.
struct ModelPrice {
  double input_per_token = 0.0;
  double output_per_token = 0.0;

  double dollars(std::int64_t prompt_tokens, std::int64_t completion_tokens) const {
    return static_cast<double>(prompt_tokens) * input_per_token +
           static_cast<double>(completion_tokens) * output_per_token;
  }
};

/// Model-name → price map, loaded from a config file so rates can track
/// provider changes without a rebuild.
struct PriceTable {
  std::map<std::string, ModelPrice> prices;

  std::optional<ModelPrice> find(const std::string& model) const {
    const auto it = prices.find(model);
    if (it == prices.end()) return std::nullopt;
    return it->second;
  }

  static PriceTable from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("prices") || !j.at("prices").is_object()) {
      throw ConfigError("price table must be an object with a \"prices\" object");
    }
    PriceTable table;
    for (const auto& [model, entry] : j.at("prices").items()) {
      if (!entry.is_object() || !entry.contains("input_per_token") ||
          !entry.contains("output_per_token")) {
        throw ConfigError("price for '" + model +
                          "' needs input_per_token and output_per_token");
      }
      ModelPrice price;
      price.input_per_token = entry.at("input_per_token").get<double>();
      price.output_per_token = entry.at("output_per_token").get<double>();
      if (price.input_per_token < 0 || price.output_per_token < 0) {
        throw ConfigError("price for '" + model + "' is negative");
      }
      table.prices.emplace(model, price);
    }
    return table;
  }

  static PriceTable load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
    return from_json(j);
  }
};

struct CostRecord {
  std::string model;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double dollars = 0.0;
  std::string timestamp;  // ISO 8601 UTC

  nlohmann::json to_json() const {
    return {{"model", model},
            {"prompt_tokens", prompt_tokens},
            {"completion_tokens", completion_tokens},
            {"dollars", dollars},
            {"timestamp", timestamp}};
  }

  static CostRecord from_json(const nlohmann::json& j) {
    CostRecord r;
    r.model = j.at("model").get<std::string>();
    r.prompt_tokens = j.at("prompt_tokens").get<std::int64_t>();
    r.completion_tokens = j.at("completion_tokens").get<std::int64_t>();
    r.dollars = j.at("dollars").get<double>();
    r.timestamp = j.value("timestamp", "");
    return r;
  }
};

struct CostTotals {
  std::int64_t calls = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double dollars = 0.0;

  void add(const CostRecord& r) {
    ++calls;
    prompt_tokens += r.prompt_tokens;
    completion_tokens += r.completion_tokens;
    dollars += r.dollars;
  }
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Append-only spend log shared by concurrent workers. Optionally mirrors
/// every record to a JSONL file as it arrives, so a crashed run still has
/// its spend on disk.
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger&) = delete;
  CostLedger& operator=(const CostLedger&) = delete;

  void set_sink(const std::filesystem::path& path) {
    std::lock_guard lock(mu_);
    sink_.emplace(path, std::ios::app);
    if (!*sink_) throw ConfigError("cannot open ledger sink " + path.string());
  }

  void add(CostRecord record) {
    if (record.timestamp.empty()) record.timestamp = detail::utc_timestamp();
    std::lock_guard lock(mu_);
    if (sink_) {
      *sink_ << record.to_json().dump() << '\n';
      sink_->flush();
    }
    records_.push_back(std::move(record));
  }

  std::vector<CostRecord> records() const {
    std::lock_guard lock(mu_);
    return records_;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return records_.size();
  }

  CostTotals totals() const {
    std::lock_guard lock(mu_);
    CostTotals t;
    for (const CostRecord& r : records_) t.add(r);
    return t;
  }

  std::map<std::string, CostTotals> totals_by_model() const {
    std::lock_guard lock(mu_);
    std::map<std::string, CostTotals> by_model;
    for (const CostRecord& r : records_) by_model[r.model].add(r);
    return by_model;
  }

  static std::vector<CostRecord> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ledger file " + path.string());
    std::vector<CostRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        records.push_back(CostRecord::from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " +
                         e.what());
      }
    }
    return records;
  }

 private:
  mutable std::mutex mu_;
  std::vector<CostRecord> records_;
  mutable std::optional<std::ofstream> sink_;
};

}  // namespace sensebench

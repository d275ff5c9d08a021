#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/baselines.hpp"
#include "sensebench/dataset.hpp"
#include "sensebench/detail/io.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/gateway.hpp"

namespace sensebench {

/// Why an instance produced no (or a vacuous) prediction. All of these are
/// scored as incorrect.
enum class FailureKind { parse_failure, zero_answer, not_present, provider_error };

inline std::string to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::parse_failure: return "parse_failure";
    case FailureKind::zero_answer: return "zero_answer";
    case FailureKind::not_present: return "not_present";
    case FailureKind::provider_error: return "provider_error";
  }
  throw ConfigError("unknown failure kind");
}

inline FailureKind failure_kind_from_string(std::string_view text) {
  if (text == "parse_failure") return FailureKind::parse_failure;
  if (text == "zero_answer") return FailureKind::zero_answer;
  if (text == "not_present") return FailureKind::not_present;
  if (text == "provider_error") return FailureKind::provider_error;
  throw ParseError("unknown failure kind '" + std::string(text) + "'");
}

struct Outcome {
  std::string instance_id;
  std::string lemma;
  std::optional<SenseId> predicted;
  SenseId gold;
  bool correct = false;
  std::optional<FailureKind> failure;
  std::string method;
};

struct LemmaStats {
  std::int64_t n = 0;
  std::int64_t n_correct = 0;

  double accuracy() const {
    return n == 0 ? 0.0 : static_cast<double>(n_correct) / static_cast<double>(n);
  }
};

struct EvalReport {
  std::string system;
  std::string dataset;
  Averaging averaging = Averaging::macro_by_lemma;
  std::vector<Outcome> outcomes;  // sorted by instance id
  std::map<std::string, LemmaStats> per_lemma;
  double macro_accuracy = 0.0;
  double micro_accuracy = 0.0;
  std::map<FailureKind, std::int64_t> failure_counts;

  double headline_accuracy() const {
    return averaging == Averaging::macro_by_lemma ? macro_accuracy : micro_accuracy;
  }

  /// Aggregation is pure counting, so the report does not depend on the
  /// order outcomes arrived in; they are canonicalized by instance id.
  static EvalReport from_outcomes(std::string system, std::string dataset,
                                  Averaging averaging, std::vector<Outcome> outcomes) {
    EvalReport report;
    report.system = std::move(system);
    report.dataset = std::move(dataset);
    report.averaging = averaging;
    std::sort(outcomes.begin(), outcomes.end(),
              [](const Outcome& a, const Outcome& b) {
                return a.instance_id < b.instance_id;
              });
    report.outcomes = std::move(outcomes);

    std::int64_t n_correct = 0;
    for (const Outcome& o : report.outcomes) {
      LemmaStats& stats = report.per_lemma[o.lemma];
      ++stats.n;
      if (o.correct) {
        ++stats.n_correct;
        ++n_correct;
      }
      if (o.failure) ++report.failure_counts[*o.failure];
    }
    if (!report.outcomes.empty()) {
      report.micro_accuracy =
          static_cast<double>(n_correct) / static_cast<double>(report.outcomes.size());
      double sum = 0.0;
      for (const auto& [lemma, stats] : report.per_lemma) sum += stats.accuracy();
      report.macro_accuracy = sum / static_cast<double>(report.per_lemma.size());
    }
    return report;
  }
};

/// What a disambiguation system reports for one instance: either a
/// prediction or a classified failure (never both).
struct SystemResult {
  std::optional<Prediction> prediction;
  std::optional<FailureKind> failure;
  std::string method;
  std::string raw_reply;  // model text for LLM systems, for debugging

  static SystemResult from_prediction(Prediction p) {
    SystemResult r;
    r.method = p.method;
    r.prediction = std::move(p);
    return r;
  }

  static SystemResult from_failure(FailureKind kind, std::string method,
                                   std::string raw = {}) {
    SystemResult r;
    r.failure = kind;
    r.method = std::move(method);
    r.raw_reply = std::move(raw);
    return r;
  }
};

using SystemFn = std::function<SystemResult(const Instance&)>;

inline Outcome make_outcome(const Instance& instance, const SystemResult& result) {
  Outcome o;
  o.instance_id = instance.id;
  o.lemma = instance.lemma;
  o.gold = instance.gold;
  o.method = result.method;
  if (result.prediction) {
    o.predicted = result.prediction->chosen;
    o.correct = result.prediction->chosen == instance.gold;
  } else if (result.failure) {
    o.failure = result.failure;
  } else {
    throw Error("system result for '" + instance.id +
                "' has neither prediction nor failure");
  }
  return o;
}

struct EvalOptions {
  int workers = 1;
};

struct EvalRun {
  EvalReport report;
  /// Set when the run stopped early on an unrecoverable error; the report
  /// then covers only the instances scored before the stop.
  std::optional<std::string> abort_error;
};

/// Scores every instance through `system`, in parallel when asked to.
/// Per-instance trouble (retries exhausted) becomes a provider_error
/// outcome; auth/config/permanent errors abort the run but keep the
/// outcomes already computed.
inline EvalRun run_evaluation(const std::string& system_name,
                              const std::string& dataset_name, Averaging averaging,
                              const std::vector<Instance>& instances,
                              const SystemFn& system, const EvalOptions& options = {}) {
  std::vector<std::optional<Outcome>> slots(instances.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex abort_mu;
  std::optional<std::string> abort_error;

  const auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= instances.size()) break;
      const Instance& instance = instances[i];
      try {
        slots[i] = make_outcome(instance, system(instance));
      } catch (const RetriesExhaustedError& e) {
        slots[i] = make_outcome(
            instance, SystemResult::from_failure(FailureKind::provider_error,
                                                 "error", e.what()));
      } catch (const std::exception& e) {
        std::lock_guard lock(abort_mu);
        if (!abort_error) {
          abort_error = "instance '" + instance.id + "': " + e.what();
        }
        stop.store(true);
        break;
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(instances.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  std::vector<Outcome> outcomes;
  outcomes.reserve(instances.size());
  for (std::optional<Outcome>& slot : slots) {
    if (slot) outcomes.push_back(std::move(*slot));
  }
  EvalRun run;
  run.abort_error = std::move(abort_error);
  run.report = EvalReport::from_outcomes(system_name, dataset_name, averaging,
                                         std::move(outcomes));
  return run;
}

enum class ReportFormat { tsv, markdown };

inline ReportFormat report_format_from_string(std::string_view text) {
  if (text == "tsv") return ReportFormat::tsv;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw ConfigError("unknown report format '" + std::string(text) + "'");
}

namespace detail {

inline std::string fixed(double value, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

inline std::string failure_summary(const std::map<FailureKind, std::int64_t>& counts,
                                   std::string_view sep) {
  std::string out;
  for (const FailureKind kind :
       {FailureKind::parse_failure, FailureKind::zero_answer, FailureKind::not_present,
        FailureKind::provider_error}) {
    if (!out.empty()) out += sep;
    const auto it = counts.find(kind);
    out += to_string(kind) + "=" +
           std::to_string(it == counts.end() ? std::int64_t{0} : it->second);
  }
  return out;
}

}  // namespace detail

/// Per-lemma accuracy table (4 decimals) plus 3-decimal aggregates.
inline std::string emit_report(const EvalReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::tsv) {
    out += "# system: " + report.system + "\n";
    out += "# dataset: " + report.dataset + "\n";
    out += "# averaging: " + to_string(report.averaging) + "\n";
    out += "lemma\tn\taccuracy\n";
    for (const auto& [lemma, stats] : report.per_lemma) {
      out += lemma + "\t" + std::to_string(stats.n) + "\t" +
             detail::fixed(stats.accuracy(), 4) + "\n";
    }
    out += "# macro: " + detail::fixed(report.macro_accuracy, 3) + "\n";
    out += "# micro: " + detail::fixed(report.micro_accuracy, 3) + "\n";
    out += "# failures: " + detail::failure_summary(report.failure_counts, " ") + "\n";
  } else {
    out += "# " + report.system + " on " + report.dataset + "\n\n";
    out += "| Lemma | N | Accuracy |\n";
    out += "| --- | ---: | ---: |\n";
    for (const auto& [lemma, stats] : report.per_lemma) {
      out += "| " + lemma + " | " + std::to_string(stats.n) + " | " +
             detail::fixed(stats.accuracy(), 4) + " |\n";
    }
    out += "\nMacro accuracy: " + detail::fixed(report.macro_accuracy, 3) + "\n";
    out += "Micro accuracy: " + detail::fixed(report.micro_accuracy, 3) + "\n";
    out += "Failures: " + detail::failure_summary(report.failure_counts, ", ") + "\n";
  }
  return out;
}

/// Side-by-side per-lemma accuracies for two systems on the same dataset.
struct Comparison {
  struct Row {
    std::string lemma;
    std::int64_t n = 0;
    std::optional<double> accuracy_a;
    std::optional<double> accuracy_b;
  };

  std::string dataset;
  std::string system_a;
  std::string system_b;
  std::vector<Row> rows;  // lemmas sorted
  double macro_a = 0.0, macro_b = 0.0;
  double micro_a = 0.0, micro_b = 0.0;
};

inline Comparison compare_reports(const EvalReport& a, const EvalReport& b) {
  if (a.dataset != b.dataset) {
    throw DatasetError("cannot compare reports for different datasets ('" + a.dataset +
                       "' vs '" + b.dataset + "')");
  }
  Comparison cmp;
  cmp.dataset = a.dataset;
  cmp.system_a = a.system;
  cmp.system_b = b.system;
  cmp.macro_a = a.macro_accuracy;
  cmp.macro_b = b.macro_accuracy;
  cmp.micro_a = a.micro_accuracy;
  cmp.micro_b = b.micro_accuracy;
  std::map<std::string, Comparison::Row> rows;
  for (const auto& [lemma, stats] : a.per_lemma) {
    Comparison::Row& row = rows[lemma];
    row.lemma = lemma;
    row.n = stats.n;
    row.accuracy_a = stats.accuracy();
  }
  for (const auto& [lemma, stats] : b.per_lemma) {
    Comparison::Row& row = rows[lemma];
    row.lemma = lemma;
    row.n = std::max(row.n, stats.n);
    row.accuracy_b = stats.accuracy();
  }
  for (auto& [lemma, row] : rows) cmp.rows.push_back(std::move(row));
  return cmp;
}

inline std::string emit_comparison(const Comparison& cmp, ReportFormat format) {
  const auto acc = [](const std::optional<double>& a) {
    return a ? detail::fixed(*a, 4) : std::string("-");
  };
  const auto delta = [](const Comparison::Row& row) -> std::string {
    if (!row.accuracy_a || !row.accuracy_b) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.4f", *row.accuracy_a - *row.accuracy_b);
    return buf;
  };
  std::string out;
  if (format == ReportFormat::tsv) {
    out += "# dataset: " + cmp.dataset + "\n";
    out += "# systems: " + cmp.system_a + " vs " + cmp.system_b + "\n";
    out += "lemma\tn\t" + cmp.system_a + "\t" + cmp.system_b + "\tdelta\n";
    for (const Comparison::Row& row : cmp.rows) {
      out += row.lemma + "\t" + std::to_string(row.n) + "\t" + acc(row.accuracy_a) +
             "\t" + acc(row.accuracy_b) + "\t" + delta(row) + "\n";
    }
    out += "# macro: " + detail::fixed(cmp.macro_a, 3) + " vs " +
           detail::fixed(cmp.macro_b, 3) + "\n";
    out += "# micro: " + detail::fixed(cmp.micro_a, 3) + " vs " +
           detail::fixed(cmp.micro_b, 3) + "\n";
  } else {
    out += "# " + cmp.system_a + " vs " + cmp.system_b + " on " + cmp.dataset + "\n\n";
    out += "| Lemma | N | " + cmp.system_a + " | " + cmp.system_b + " | Delta |\n";
    out += "| --- | ---: | ---: | ---: | ---: |\n";
    for (const Comparison::Row& row : cmp.rows) {
      out += "| " + row.lemma + " | " + std::to_string(row.n) + " | " +
             acc(row.accuracy_a) + " | " + acc(row.accuracy_b) + " | " + delta(row) +
             " |\n";
    }
    out += "\nMacro accuracy: " + detail::fixed(cmp.macro_a, 3) + " vs " +
           detail::fixed(cmp.macro_b, 3) + "\n";
    out += "Micro accuracy: " + detail::fixed(cmp.micro_a, 3) + " vs " +
           detail::fixed(cmp.micro_b, 3) + "\n";
  }
  return out;
}

/// One JSON document per line: a meta header first, then one outcome per
/// instance — the machine-readable companion to the rendered reports.
inline void write_outcomes(const std::filesystem::path& path, const EvalReport& report) {
  std::string out;
  const nlohmann::json meta = {{"type", "meta"},
                               {"system", report.system},
                               {"dataset", report.dataset},
                               {"averaging", to_string(report.averaging)}};
  out += meta.dump() + "\n";
  for (const Outcome& o : report.outcomes) {
    nlohmann::json j = {
        {"instance_id", o.instance_id},
        {"lemma", o.lemma},
        {"gold", o.gold.str()},
        {"predicted", o.predicted ? nlohmann::json(o.predicted->str()) : nlohmann::json()},
        {"correct", o.correct},
        {"failure", o.failure ? nlohmann::json(to_string(*o.failure)) : nlohmann::json()},
        {"method", o.method},
    };
    out += j.dump() + "\n";
  }
  detail::write_file_atomic(path, out);
}

inline EvalReport read_outcomes(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open outcomes file " + path.string());
  std::string line;
  int line_no = 0;
  std::string system, dataset;
  Averaging averaging = Averaging::macro_by_lemma;
  bool saw_meta = false;
  std::vector<Outcome> outcomes;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!saw_meta) {
      if (j.value("type", "") != "meta") {
        throw ParseError(path.string() + ": first line must be the meta record");
      }
      system = j.at("system").get<std::string>();
      dataset = j.at("dataset").get<std::string>();
      averaging = averaging_from_string(j.at("averaging").get<std::string>());
      saw_meta = true;
      continue;
    }
    try {
      Outcome o;
      o.instance_id = j.at("instance_id").get<std::string>();
      o.lemma = j.at("lemma").get<std::string>();
      o.gold = SenseId::parse(j.at("gold").get<std::string>());
      if (!j.at("predicted").is_null()) {
        o.predicted = SenseId::parse(j.at("predicted").get<std::string>());
      }
      o.correct = j.at("correct").get<bool>();
      if (!j.at("failure").is_null()) {
        o.failure = failure_kind_from_string(j.at("failure").get<std::string>());
      }
      o.method = j.value("method", "");
      outcomes.push_back(std::move(o));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_meta) throw ParseError(path.string() + ": missing meta record");
  return EvalReport::from_outcomes(system, dataset, averaging, std::move(outcomes));
}

}  // namespace sensebench

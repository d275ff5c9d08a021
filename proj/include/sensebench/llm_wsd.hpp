#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sensebench/dataset.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/eval.hpp"
#include "sensebench/gateway.hpp"
#include "sensebench/prompts.hpp"
#include "sensebench/sense_graph.hpp"

namespace sensebench {

struct LlmWsdOptions {
  PromptMode mode = PromptMode::neighborhood;
  int max_neighbors = 4;
  /// Definition modes normally fail on a candidate without a definition;
  /// with this set they drop to a neighborhood prompt for that instance.
  bool fallback_to_neighborhood = false;
};

/// The prompt an instance would be asked with, honoring the configured
/// mode and the missing-definition fallback.
inline PromptBundle build_wsd_prompt(const Instance& instance, const SenseGraph& graph,
                                     const DefinitionMap& definitions,
                                     const PromptTemplates& templates,
                                     const LlmWsdOptions& options = {}) {
  try {
    return build_prompt(options.mode, instance, graph, definitions, templates,
                        options.max_neighbors);
  } catch (const MissingDefinitionError&) {
    if (!options.fallback_to_neighborhood) throw;
    return build_neighborhood_prompt(instance, graph, templates, options.max_neighbors);
  }
}

/// Prompts a model for each instance and maps its numeric answer back to a
/// sense. Malformed replies and "0: none apply" become classified failures;
/// unrecoverable provider errors propagate to abort the run.
class LlmDisambiguator {
 public:
  LlmDisambiguator(CompletionGateway& gateway, ModelRef model, const SenseGraph& graph,
                   PromptTemplates templates, DefinitionMap definitions = {},
                   LlmWsdOptions options = {})
      : gateway_(&gateway),
        model_(std::move(model)),
        graph_(&graph),
        templates_(std::move(templates)),
        definitions_(std::move(definitions)),
        options_(std::move(options)),
        method_("llm/" + to_string(options_.mode)) {}

  const std::string& method() const { return method_; }

  PromptBundle bundle_for(const Instance& instance) const {
    return build_wsd_prompt(instance, *graph_, definitions_, templates_, options_);
  }

  SystemResult operator()(const Instance& instance) const {
    const PromptBundle bundle = bundle_for(instance);
    const Completion completion =
        gateway_->complete(model_, bundle.system_text, bundle.user_text);
    const ModelAnswer answer =
        parse_answer(completion.text, static_cast<int>(bundle.sense_index.size()));
    if (!answer.ok()) {
      return SystemResult::from_failure(FailureKind::parse_failure, method_,
                                        completion.text);
    }
    if (*answer.parsed == 0) {
      return SystemResult::from_failure(FailureKind::zero_answer, method_,
                                        completion.text);
    }
    Prediction prediction;
    prediction.chosen = bundle.sense_for(*answer.parsed);
    prediction.method = method_;
    SystemResult result = SystemResult::from_prediction(std::move(prediction));
    result.raw_reply = completion.text;
    return result;
  }

 private:
  CompletionGateway* gateway_;
  ModelRef model_;
  const SenseGraph* graph_;
  PromptTemplates templates_;
  DefinitionMap definitions_;
  LlmWsdOptions options_;
  std::string method_;
};

/// Scripts a mock so every instance is answered with its gold sense's
/// local number ("0" when the gold sense is not among the candidates) —
/// the offline stand-in for a perfect model.
inline void script_gold_answers(MockProvider& mock, const std::vector<Instance>& instances,
                                const SenseGraph& graph, const DefinitionMap& definitions,
                                const PromptTemplates& templates,
                                const LlmWsdOptions& options = {},
                                std::int64_t prompt_tokens = 0,
                                std::int64_t completion_tokens = 0) {
  for (const Instance& instance : instances) {
    const PromptBundle bundle =
        build_wsd_prompt(instance, graph, definitions, templates, options);
    std::string text = "0";
    for (std::size_t i = 0; i < bundle.sense_index.size(); ++i) {
      if (bundle.sense_index[i] == instance.gold) {
        text = std::to_string(i + 1);
        break;
      }
    }
    mock.script(bundle.system_text, bundle.user_text,
                {std::move(text), prompt_tokens, completion_tokens});
  }
}

struct DefinitionWriteError {
  std::string lemma;
  std::vector<SenseId> senses;
  std::string message;
  std::string raw_reply;
};

struct DefinitionWriteResult {
  DefinitionMap definitions;  // newly written this run
  std::vector<DefinitionWriteError> errors;
  int calls = 0;
  int skipped = 0;  // (lemma, candidate-set) pairs already fully covered
};

/// Writes model definitions for every distinct (lemma, candidate-set) pair
/// in the dataset — each sense is defined at most once. Pairs whose senses
/// all exist in `existing` are skipped, which makes reruns resumable.
/// Malformed replies are collected, not fatal.
inline DefinitionWriteResult write_model_definitions(
    CompletionGateway& gateway, const ModelRef& model, const SenseGraph& graph,
    const PromptTemplates& templates, const std::vector<Instance>& instances,
    const DefinitionMap& existing = {}, int max_neighbors = 4) {
  // Dedup key: lemma plus the sorted candidate set.
  std::map<std::string, std::pair<std::string, std::vector<SenseId>>> pairs;
  for (const Instance& instance : instances) {
    std::vector<SenseId> candidates = instance.sorted_candidates();
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    std::string key = instance.lemma;
    for (const SenseId& c : candidates) key += "\x1f" + c.str();
    pairs.emplace(std::move(key), std::make_pair(instance.lemma, std::move(candidates)));
  }

  DefinitionWriteResult result;
  for (const auto& [key, pair] : pairs) {
    const auto& [lemma, candidates] = pair;
    const bool covered = std::all_of(
        candidates.begin(), candidates.end(), [&](const SenseId& c) {
          return existing.contains(c) || result.definitions.contains(c);
        });
    if (covered) {
      ++result.skipped;
      continue;
    }
    const PromptBundle bundle = build_definition_writing_prompt(
        lemma, candidates, graph, templates, max_neighbors);
    std::vector<int> expected(bundle.sense_index.size());
    for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = static_cast<int>(i + 1);

    std::string raw;
    try {
      const Completion completion =
          gateway.complete(model, bundle.system_text, bundle.user_text);
      raw = completion.text;
      ++result.calls;
      const std::map<int, WrittenSense> written = parse_written_definitions(raw, expected);
      for (const auto& [number, ws] : written) {
        const SenseId& sense = bundle.sense_for(number);
        if (existing.contains(sense) || result.definitions.contains(sense)) continue;
        SenseDefinition def;
        def.sense_id = sense;
        def.definition = ws.definition;
        if (!ws.example.empty()) def.example = ws.example;
        def.source = DefinitionSource::model(model.model_name);
        result.definitions.emplace(sense, std::move(def));
      }
    } catch (const PromptError& e) {
      result.errors.push_back({lemma, candidates, e.what(), raw});
    } catch (const RetriesExhaustedError& e) {
      result.errors.push_back({lemma, candidates, e.what(), raw});
    }
  }
  return result;
}

}  // namespace sensebench

#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/dataset.hpp"
#include "sensebench/detail/io.hpp"
#include "sensebench/detail/text.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/sense_graph.hpp"

namespace sensebench {

enum class PromptMode {
  neighborhood,
  definition,
  auto_definition,
  chain_of_thought,
  write_definitions,
};

inline std::string to_string(PromptMode mode) {
  switch (mode) {
    case PromptMode::neighborhood: return "neighborhood";
    case PromptMode::definition: return "definition";
    case PromptMode::auto_definition: return "auto_definition";
    case PromptMode::chain_of_thought: return "chain_of_thought";
    case PromptMode::write_definitions: return "write_definitions";
  }
  throw ConfigError("unknown prompt mode");
}

inline PromptMode prompt_mode_from_string(std::string_view text) {
  if (text == "neighborhood" || text == "n") return PromptMode::neighborhood;
  if (text == "definition" || text == "d") return PromptMode::definition;
  if (text == "auto_definition" || text == "ad") return PromptMode::auto_definition;
  if (text == "chain_of_thought" || text == "cot") return PromptMode::chain_of_thought;
  if (text == "write_definitions") return PromptMode::write_definitions;
  throw ConfigError("unknown prompt mode '" + std::string(text) + "'");
}

/// The editable system prompts, one file per mode. Files are stored with a
/// final newline for editor friendliness; loading strips exactly one.
struct PromptTemplates {
  std::string neighborhood_system;
  std::string definition_system;
  std::string write_definitions_system;
  std::string chain_of_thought_system;

  static PromptTemplates load(const std::filesystem::path& dir) {
    const auto read = [&dir](const char* name) {
      std::string text = detail::read_file(dir / name);
      if (!text.empty() && text.back() == '\n') text.pop_back();
      return text;
    };
    PromptTemplates t;
    t.neighborhood_system = read("neighborhood_system.txt");
    t.definition_system = read("definition_system.txt");
    t.write_definitions_system = read("write_definitions_system.txt");
    t.chain_of_thought_system = read("chain_of_thought_system.txt");
    return t;
  }

  const std::string& system_for(PromptMode mode) const {
    switch (mode) {
      case PromptMode::neighborhood: return neighborhood_system;
      case PromptMode::definition:
      case PromptMode::auto_definition: return definition_system;
      case PromptMode::chain_of_thought: return chain_of_thought_system;
      case PromptMode::write_definitions: return write_definitions_system;
    }
    throw ConfigError("unknown prompt mode");
  }
};

/// A ready-to-send prompt pair plus the mapping from the local sense
/// numbers used in the text (1..k) back to sense ids.
struct PromptBundle {
  PromptMode mode = PromptMode::neighborhood;
  std::string system_text;
  std::string user_text;
  std::vector<SenseId> sense_index;  // position i holds local number i+1
  std::vector<std::string> warnings;

  const SenseId& sense_for(int local_number) const {
    if (local_number < 1 || local_number > static_cast<int>(sense_index.size())) {
      throw PromptError("local sense number " + std::to_string(local_number) +
                        " out of range");
    }
    return sense_index[static_cast<std::size_t>(local_number - 1)];
  }
};

/// The context window as shown to the model: all tokens in order, single
/// spaces between them, the target wrapped as `* token *`.
inline std::string render_context(const Instance& instance) {
  std::string out;
  for (std::size_t si = 0; si < instance.sentences.size(); ++si) {
    const auto& sentence = instance.sentences[si];
    for (std::size_t ti = 0; ti < sentence.size(); ++ti) {
      if (!out.empty()) out += ' ';
      if (static_cast<int>(si) == instance.target_sentence &&
          static_cast<int>(ti) == instance.target_token) {
        out += "* " + sentence[ti] + " *";
      } else {
        out += sentence[ti];
      }
    }
  }
  return out;
}

namespace detail {

/// `Senses: 1: related to "w1", "w2";\n2: related to ...` — the first entry
/// continues the header line, entries end with ";" except the last.
inline std::string senses_block(const SenseGraph& graph,
                                const std::vector<SenseId>& candidates,
                                int max_neighbors,
                                std::vector<std::string>& warnings) {
  std::string out = "Senses: ";
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::vector<std::string> words =
        neighborhood(graph, candidates[i], max_neighbors);
    out += std::to_string(i + 1) + ": related to";
    if (words.empty()) {
      warnings.push_back("sense '" + candidates[i].str() +
                         "' has an empty neighborhood");
    } else {
      out += ' ';
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) out += ", ";
        out += '"' + words[w] + '"';
      }
    }
    out += i + 1 < candidates.size() ? ";\n" : "";
  }
  return out;
}

inline std::vector<SenseId> checked_candidates(const Instance& instance,
                                               const SenseGraph& graph) {
  std::vector<SenseId> candidates = instance.sorted_candidates();
  for (const SenseId& c : candidates) {
    if (!graph.contains(c)) {
      throw PromptError("candidate sense '" + c.str() + "' is not in the lexicon");
    }
  }
  return candidates;
}

}  // namespace detail

inline PromptBundle build_neighborhood_prompt(const Instance& instance,
                                              const SenseGraph& graph,
                                              const PromptTemplates& templates,
                                              int max_neighbors = 4) {
  PromptBundle bundle;
  bundle.mode = PromptMode::neighborhood;
  bundle.system_text = templates.neighborhood_system;
  bundle.sense_index = detail::checked_candidates(instance, graph);
  bundle.user_text =
      "Entry: " + instance.lemma + "\n" +
      detail::senses_block(graph, bundle.sense_index, max_neighbors, bundle.warnings) +
      "\nSentence: " + render_context(instance);
  return bundle;
}

/// Definition-based prompt; `mode` distinguishes human definitions from
/// model-written ones (auto_definition) — the template is shared.
inline PromptBundle build_definition_prompt(const Instance& instance,
                                            const DefinitionMap& definitions,
                                            const PromptTemplates& templates,
                                            PromptMode mode = PromptMode::definition) {
  if (mode != PromptMode::definition && mode != PromptMode::auto_definition) {
    throw ConfigError("build_definition_prompt expects a definition mode");
  }
  PromptBundle bundle;
  bundle.mode = mode;
  bundle.system_text = templates.definition_system;
  bundle.sense_index = instance.sorted_candidates();
  std::string body = "Entry: " + instance.lemma + "\nSense definitions:\n";
  for (std::size_t i = 0; i < bundle.sense_index.size(); ++i) {
    const auto it = definitions.find(bundle.sense_index[i]);
    if (it == definitions.end()) {
      throw MissingDefinitionError(bundle.sense_index[i].str());
    }
    body += std::to_string(i + 1) + ": " + it->second.definition + "\n";
  }
  bundle.user_text = body + "Sentence: " + render_context(instance);
  return bundle;
}

/// Lexicographer prompt asking the model to write one definition + example
/// per sense, returned as a JSON object keyed by the local numbers.
inline PromptBundle build_definition_writing_prompt(const std::string& lemma,
                                                    const std::vector<SenseId>& candidates,
                                                    const SenseGraph& graph,
                                                    const PromptTemplates& templates,
                                                    int max_neighbors = 4) {
  if (candidates.empty()) throw PromptError("no senses to define");
  PromptBundle bundle;
  bundle.mode = PromptMode::write_definitions;
  bundle.system_text = templates.write_definitions_system;
  bundle.sense_index = candidates;
  std::sort(bundle.sense_index.begin(), bundle.sense_index.end());
  bundle.sense_index.erase(
      std::unique(bundle.sense_index.begin(), bundle.sense_index.end()),
      bundle.sense_index.end());
  for (const SenseId& c : bundle.sense_index) {
    if (c.lemma != lemma) {
      throw PromptError("sense '" + c.str() + "' does not belong to lemma '" +
                        lemma + "'");
    }
    if (!graph.contains(c)) {
      throw PromptError("candidate sense '" + c.str() + "' is not in the lexicon");
    }
  }
  bundle.user_text =
      "Entry: " + lemma + "\n" +
      detail::senses_block(graph, bundle.sense_index, max_neighbors, bundle.warnings);
  return bundle;
}

inline PromptBundle build_cot_prompt(const Instance& instance, const SenseGraph& graph,
                                     const PromptTemplates& templates,
                                     int max_neighbors = 4) {
  PromptBundle bundle = build_neighborhood_prompt(instance, graph, templates, max_neighbors);
  bundle.mode = PromptMode::chain_of_thought;
  bundle.system_text = templates.chain_of_thought_system;
  return bundle;
}

inline PromptBundle build_prompt(PromptMode mode, const Instance& instance,
                                 const SenseGraph& graph, const DefinitionMap& definitions,
                                 const PromptTemplates& templates, int max_neighbors = 4) {
  switch (mode) {
    case PromptMode::neighborhood:
      return build_neighborhood_prompt(instance, graph, templates, max_neighbors);
    case PromptMode::definition:
    case PromptMode::auto_definition:
      return build_definition_prompt(instance, definitions, templates, mode);
    case PromptMode::chain_of_thought:
      return build_cot_prompt(instance, graph, templates, max_neighbors);
    case PromptMode::write_definitions:
      throw ConfigError("write_definitions is not a disambiguation mode");
  }
  throw ConfigError("unknown prompt mode");
}

/// A reply to a disambiguation prompt. `parsed` is empty when the reply's
/// last line is not a bare number in range (a parse failure, scored wrong).
struct ModelAnswer {
  std::string raw;
  std::optional<int> parsed;  // 0 = "none of the senses apply"

  bool ok() const { return parsed.has_value(); }
};

/// The contract says the chosen identifier stands alone on the last line.
/// The last non-empty line is trimmed of whitespace and trailing ASCII
/// punctuation, then must read as a base-10 integer in [0, k].
inline ModelAnswer parse_answer(const std::string& raw, int k) {
  ModelAnswer answer;
  answer.raw = raw;
  std::string_view rest = raw;
  std::string_view line;
  while (!rest.empty()) {
    const std::size_t nl = rest.find('\n');
    std::string_view current = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!detail::trim(current).empty()) line = current;
  }
  line = detail::trim(line);
  while (!line.empty() && detail::is_ascii_punct(line.back())) {
    line.remove_suffix(1);
  }
  line = detail::trim(line);
  if (line.empty() || !std::all_of(line.begin(), line.end(), [](char c) {
        return detail::is_ascii_digit(c);
      })) {
    return answer;
  }
  int value = 0;
  const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
  if (ec != std::errc{} || ptr != line.data() + line.size() || value > k) {
    return answer;
  }
  answer.parsed = value;
  return answer;
}

struct WrittenSense {
  std::string definition;
  std::string example;
};

namespace detail {

/// Outermost balanced {...} in the reply, tolerant of surrounding prose
/// and code fences. String-aware so braces inside values don't derail it.
inline std::optional<std::string> extract_json_object(const std::string& raw) {
  const std::size_t start = raw.find('{');
  if (start == std::string::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return raw.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Parses a definition-writing reply. Expects exactly the requested local
/// numbers as keys, each holding [definition, example]. Replies whose JSON
/// strings were wrapped across lines get a single repair pass (raw newlines
/// inside the object replaced by spaces) before giving up.
inline std::map<int, WrittenSense> parse_written_definitions(
    const std::string& raw, const std::vector<int>& expected) {
  const std::optional<std::string> object_text = detail::extract_json_object(raw);
  if (!object_text) {
    throw PromptError("reply contains no JSON object");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*object_text);
  } catch (const nlohmann::json::exception&) {
    std::string healed = *object_text;
    std::replace(healed.begin(), healed.end(), '\n', ' ');
    std::replace(healed.begin(), healed.end(), '\r', ' ');
    try {
      j = nlohmann::json::parse(healed);
    } catch (const nlohmann::json::exception& e) {
      throw PromptError(std::string("reply is not valid JSON: ") + e.what());
    }
  }
  if (!j.is_object()) throw PromptError("reply JSON is not an object");

  std::map<int, WrittenSense> out;
  for (const auto& [key, value] : j.items()) {
    int number = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), number);
    if (ec != std::errc{} || ptr != key.data() + key.size()) {
      throw PromptError("reply key '" + key + "' is not a sense number");
    }
    if (std::find(expected.begin(), expected.end(), number) == expected.end()) {
      throw PromptError("reply contains unexpected sense number " + key);
    }
    if (!value.is_array() || value.size() != 2 || !value[0].is_string() ||
        !value[1].is_string()) {
      throw PromptError("sense " + key + " must map to [definition, example]");
    }
    out.emplace(number, WrittenSense{value[0].get<std::string>(),
                                     value[1].get<std::string>()});
  }
  for (const int number : expected) {
    if (!out.contains(number)) {
      throw PromptError("reply is missing sense number " + std::to_string(number));
    }
  }
  return out;
}

}  // namespace sensebench

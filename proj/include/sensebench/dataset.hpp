#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/errors.hpp"
#include "sensebench/sense_id.hpp"

namespace sensebench {

/// One disambiguation problem: a target word occurrence with its tokenized
/// multi-sentence context, the candidate senses proposed by the upstream
/// lemmatization pipeline, and the annotated gold sense. The gold sense is
/// not required to appear among the candidates; that gap is what the
/// upper-bound baseline measures.
struct Instance {
  std::string id;
  std::string lemma;
  std::optional<std::string> pos;
  std::vector<std::vector<std::string>> sentences;
  int target_sentence = 0;
  int target_token = 0;
  std::vector<SenseId> candidates;
  SenseId gold;
  bool flag_multiword = false;
  bool flag_compound = false;

  bool operator==(const Instance&) const = default;

  bool excluded() const { return flag_multiword || flag_compound; }

  const std::string& target_word() const {
    return sentences[static_cast<std::size_t>(target_sentence)]
                    [static_cast<std::size_t>(target_token)];
  }

  /// Candidates in canonical (lemma, sense_no) order.
  std::vector<SenseId> sorted_candidates() const {
    std::vector<SenseId> out = candidates;
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct DefinitionSource {
  bool is_model = false;
  std::string model_name;

  bool operator==(const DefinitionSource&) const = default;

  static DefinitionSource human() { return {}; }
  static DefinitionSource model(std::string name) { return {true, std::move(name)}; }

  std::string str() const { return is_model ? "model:" + model_name : "human"; }

  static DefinitionSource parse(std::string_view text) {
    if (text == "human") return human();
    if (text.starts_with("model:") && text.size() > 6) {
      return model(std::string(text.substr(6)));
    }
    throw ParseError("invalid definition source '" + std::string(text) +
                     "': expected \"human\" or \"model:<name>\"");
  }
};

/// A textual description of one sense, either lexicographer-written or
/// produced by a model from graph neighborhoods.
struct SenseDefinition {
  SenseId sense_id;
  std::string definition;
  std::optional<std::string> example;
  DefinitionSource source;

  bool operator==(const SenseDefinition&) const = default;
};

using DefinitionMap = std::map<SenseId, SenseDefinition>;

enum class Averaging { macro_by_lemma, micro };

inline std::string to_string(Averaging a) {
  return a == Averaging::macro_by_lemma ? "macro_by_lemma" : "micro";
}

inline Averaging averaging_from_string(std::string_view text) {
  if (text == "macro_by_lemma" || text == "macro") return Averaging::macro_by_lemma;
  if (text == "micro") return Averaging::micro;
  throw ConfigError("invalid averaging '" + std::string(text) + "'");
}

/// A named evaluation set, optionally with a training split (lexical-sample
/// corpora only) and the averaging convention its headline number uses.
struct Dataset {
  std::string name;
  Averaging averaging = Averaging::macro_by_lemma;
  std::optional<std::vector<Instance>> train;
  std::vector<Instance> test;
};

namespace detail {

inline SenseId sense_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_string()) throw ParseError(std::string(what) + " must be a string");
  return SenseId::parse(j.get<std::string>());
}

inline Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("record must be an object");
  Instance inst;
  inst.id = j.at("id").get<std::string>();
  if (inst.id.empty()) throw ParseError("empty instance id");
  inst.lemma = j.at("lemma").get<std::string>();
  if (inst.lemma.empty()) throw ParseError("empty lemma");
  if (j.contains("pos") && !j.at("pos").is_null()) {
    inst.pos = j.at("pos").get<std::string>();
  }
  const nlohmann::json& sentences = j.at("sentences");
  if (!sentences.is_array() || sentences.empty()) {
    throw ParseError("sentences must be a non-empty array");
  }
  for (const nlohmann::json& sentence : sentences) {
    std::vector<std::string> tokens;
    for (const nlohmann::json& tok : sentence) {
      std::string t = tok.get<std::string>();
      if (t.empty() || t.find(' ') != std::string::npos ||
          t.find('\n') != std::string::npos) {
        throw ParseError("token '" + t + "' is empty or contains whitespace");
      }
      tokens.push_back(std::move(t));
    }
    inst.sentences.push_back(std::move(tokens));
  }
  const nlohmann::json& target = j.at("target");
  if (!target.is_array() || target.size() != 2) {
    throw ParseError("target must be [sentence_index, token_index]");
  }
  inst.target_sentence = target[0].get<int>();
  inst.target_token = target[1].get<int>();
  if (inst.target_sentence < 0 ||
      inst.target_sentence >= static_cast<int>(inst.sentences.size())) {
    throw ParseError("target sentence index out of range");
  }
  const auto& sent = inst.sentences[static_cast<std::size_t>(inst.target_sentence)];
  if (inst.target_token < 0 || inst.target_token >= static_cast<int>(sent.size())) {
    throw ParseError("target token index out of range");
  }
  const nlohmann::json& candidates = j.at("candidates");
  if (!candidates.is_array() || candidates.empty()) {
    throw ParseError("candidates must be a non-empty array");
  }
  std::unordered_set<SenseId, SenseIdHash> seen;
  for (const nlohmann::json& c : candidates) {
    SenseId id = sense_from_json(c, "candidate");
    if (!seen.insert(id).second) {
      throw ParseError("duplicate candidate '" + id.str() + "'");
    }
    inst.candidates.push_back(std::move(id));
  }
  inst.gold = sense_from_json(j.at("gold"), "gold");
  if (j.contains("flags") && !j.at("flags").is_null()) {
    for (const nlohmann::json& f : j.at("flags")) {
      const std::string flag = f.get<std::string>();
      if (flag == "multiword") {
        inst.flag_multiword = true;
      } else if (flag == "compound") {
        inst.flag_compound = true;
      } else {
        throw ParseError("unknown exclusion flag '" + flag + "'");
      }
    }
  }
  return inst;
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["id"] = inst.id;
  j["lemma"] = inst.lemma;
  if (inst.pos) j["pos"] = *inst.pos;
  j["sentences"] = inst.sentences;
  j["target"] = {inst.target_sentence, inst.target_token};
  nlohmann::json candidates = nlohmann::json::array();
  for (const SenseId& c : inst.candidates) candidates.push_back(c.str());
  j["candidates"] = std::move(candidates);
  j["gold"] = inst.gold.str();
  nlohmann::json flags = nlohmann::json::array();
  if (inst.flag_multiword) flags.push_back("multiword");
  if (inst.flag_compound) flags.push_back("compound");
  j["flags"] = std::move(flags);
  return j;
}

}  // namespace detail

/// Reads the one-record-per-line instance format, preserving input order.
/// Rejects malformed records, duplicate ids and out-of-range targets, always
/// reporting the offending line number.
inline std::vector<Instance> load_instances(std::istream& source) {
  std::vector<Instance> out;
  std::unordered_set<std::string> ids;
  std::string line;
  long line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    try {
      Instance inst = detail::instance_from_json(nlohmann::json::parse(line));
      if (!ids.insert(inst.id).second) {
        throw ParseError("duplicate instance id '" + inst.id + "'");
      }
      out.push_back(std::move(inst));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Instance> load_instances_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open instance file: " + path.string());
  return load_instances(in);
}

inline void save_instances(const std::vector<Instance>& instances, std::ostream& sink) {
  for (const Instance& inst : instances) {
    sink << detail::instance_to_json(inst).dump() << '\n';
  }
}

/// Drops instances that are not genuine disambiguation problems: those with
/// a single candidate and those flagged as multi-word or compound readings.
/// Order-preserving and idempotent.
inline std::vector<Instance> filter_for_evaluation(std::vector<Instance> instances) {
  std::vector<Instance> out;
  out.reserve(instances.size());
  for (Instance& inst : instances) {
    if (inst.candidates.size() <= 1 || inst.excluded()) continue;
    out.push_back(std::move(inst));
  }
  return out;
}

/// Reads the one-record-per-line definition format into a sense-keyed map.
inline DefinitionMap load_definitions(std::istream& source) {
  DefinitionMap out;
  std::string line;
  long line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      SenseDefinition def;
      def.sense_id = detail::sense_from_json(j.at("sense_id"), "sense_id");
      def.definition = j.at("definition").get<std::string>();
      if (def.definition.empty()) throw ParseError("empty definition");
      if (j.contains("example") && !j.at("example").is_null()) {
        def.example = j.at("example").get<std::string>();
      }
      def.source = DefinitionSource::parse(j.at("source").get<std::string>());
      if (out.contains(def.sense_id)) {
        throw ParseError("duplicate sense id '" + def.sense_id.str() + "'");
      }
      out.emplace(def.sense_id, std::move(def));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw DatasetError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline DefinitionMap load_definitions_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open definition file: " + path.string());
  return load_definitions(in);
}

/// Writes definitions in sense-id order; load(save(m)) == m.
inline void save_definitions(const DefinitionMap& definitions, std::ostream& sink) {
  for (const auto& [id, def] : definitions) {
    nlohmann::json j;
    j["sense_id"] = id.str();
    j["definition"] = def.definition;
    j["example"] = def.example ? nlohmann::json(*def.example) : nlohmann::json(nullptr);
    j["source"] = def.source.str();
    sink << j.dump() << '\n';
  }
}

inline void save_definitions_file(const DefinitionMap& definitions,
                                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write definition file: " + path.string());
  save_definitions(definitions, out);
}

}  // namespace sensebench

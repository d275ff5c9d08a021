#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensebench/detail/text.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/sense_id.hpp"

namespace sensebench {

/// One lexicon sense with its outgoing association edges: a single primary
/// descriptor (absent only in the root region of the lexicon) and an ordered
/// list of secondary descriptors.
struct SenseEntry {
  SenseId id;
  std::optional<SenseId> primary_descriptor;
  std::vector<SenseId> secondary_descriptors;
};

/// An immutable sense lexicon indexed three ways: by sense id, by the
/// transpose of the primary-descriptor relation ("children"), and by lemma.
/// All index orderings follow entry insertion order, so identical input
/// bytes always produce the identical graph. Safe for concurrent reads.
class SenseGraph {
 public:
  SenseGraph() = default;

  /// Validates per-entry invariants, rejects duplicate ids and, in strict
  /// mode, descriptor references that do not resolve to an entry.
  static SenseGraph build(std::vector<SenseEntry> entries, bool strict = false) {
    SenseGraph g;
    g.order_.reserve(entries.size());
    for (SenseEntry& entry : entries) {
      validate_entry(entry);
      if (g.entries_.contains(entry.id)) {
        throw LexiconError("duplicate sense id '" + entry.id.str() + "'");
      }
      g.order_.push_back(entry.id);
      if (entry.primary_descriptor) {
        g.inverse_pd_[*entry.primary_descriptor].push_back(entry.id);
      }
      g.by_lemma_[entry.id.lemma].push_back(entry.id);
      g.entries_.emplace(entry.id, std::move(entry));
    }
    if (strict) {
      for (const SenseId& id : g.order_) {
        const SenseEntry& entry = g.entries_.at(id);
        if (entry.primary_descriptor && !g.contains(*entry.primary_descriptor)) {
          throw LexiconError("dangling primary descriptor '" +
                             entry.primary_descriptor->str() + "' on '" +
                             id.str() + "'");
        }
        for (const SenseId& sd : entry.secondary_descriptors) {
          if (!g.contains(sd)) {
            throw LexiconError("dangling secondary descriptor '" + sd.str() +
                               "' on '" + id.str() + "'");
          }
        }
      }
    }
    return g;
  }

  bool contains(const SenseId& id) const { return entries_.contains(id); }

  const SenseEntry* find(const SenseId& id) const {
    const auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const SenseEntry& at(const SenseId& id) const {
    const SenseEntry* entry = find(id);
    if (!entry) throw GraphError("unknown sense '" + id.str() + "'");
    return *entry;
  }

  /// Senses whose primary descriptor is `id`, in insertion order.
  const std::vector<SenseId>& children(const SenseId& id) const {
    static const std::vector<SenseId> kEmpty;
    const auto it = inverse_pd_.find(id);
    return it == inverse_pd_.end() ? kEmpty : it->second;
  }

  /// All senses of a lemma, in insertion order.
  const std::vector<SenseId>& senses_of_lemma(const std::string& lemma) const {
    static const std::vector<SenseId> kEmpty;
    const auto it = by_lemma_.find(lemma);
    return it == by_lemma_.end() ? kEmpty : it->second;
  }

  /// Sense ids in insertion order.
  const std::vector<SenseId>& nodes() const { return order_; }

  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }

 private:
  static void validate_entry(const SenseEntry& entry) {
    if (entry.primary_descriptor && *entry.primary_descriptor == entry.id) {
      throw LexiconError("sense '" + entry.id.str() +
                         "' lists itself as primary descriptor");
    }
    std::unordered_set<SenseId, SenseIdHash> seen;
    for (const SenseId& sd : entry.secondary_descriptors) {
      if (sd == entry.id) {
        throw LexiconError("sense '" + entry.id.str() +
                           "' lists itself as secondary descriptor");
      }
      if (entry.primary_descriptor && sd == *entry.primary_descriptor) {
        throw LexiconError("sense '" + entry.id.str() +
                           "' repeats its primary descriptor '" + sd.str() +
                           "' as secondary descriptor");
      }
      if (!seen.insert(sd).second) {
        throw LexiconError("sense '" + entry.id.str() +
                           "' has duplicate secondary descriptor '" + sd.str() +
                           "'");
      }
    }
  }

  std::vector<SenseId> order_;
  std::unordered_map<SenseId, SenseEntry, SenseIdHash> entries_;
  std::unordered_map<SenseId, std::vector<SenseId>, SenseIdHash> inverse_pd_;
  std::unordered_map<std::string, std::vector<SenseId>> by_lemma_;
};

namespace detail {

/// Splits a space-separated list of sense ids where lemmas may themselves
/// contain spaces; a token group is complete once it ends in "..<digits>".
inline std::vector<SenseId> parse_sense_id_list(std::string_view field) {
  std::vector<SenseId> out;
  std::string current;
  for (const std::string& word : split(field, ' ')) {
    if (word.empty()) continue;
    if (current.empty()) {
      current = word;
    } else {
      current += ' ';
      current += word;
    }
    if (SenseId::has_sense_suffix(current)) {
      out.push_back(SenseId::parse(current));
      current.clear();
    }
  }
  if (!current.empty()) {
    throw ParseError("trailing descriptor text '" + current +
                     "' is not a sense id");
  }
  return out;
}

}  // namespace detail

/// Reads the lexicon TSV format: one sense per line,
/// `sense_id <TAB> primary_descriptor_or_empty <TAB> secondary descriptors`.
/// Lines starting with '#' and blank lines are skipped. In strict mode every
/// referenced descriptor must resolve to an entry.
inline SenseGraph load_lexicon(std::istream& source, bool strict = false) {
  std::vector<SenseEntry> entries;
  std::unordered_set<SenseId, SenseIdHash> seen;
  std::string line;
  long line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      const std::vector<std::string> fields = detail::split(line, '\t');
      if (fields.size() > 3) {
        throw ParseError("expected at most 3 tab-separated fields, got " +
                         std::to_string(fields.size()));
      }
      SenseEntry entry;
      entry.id = SenseId::parse(fields[0]);
      if (fields.size() > 1 && !detail::trim(fields[1]).empty()) {
        entry.primary_descriptor = SenseId::parse(detail::trim(fields[1]));
      }
      if (fields.size() > 2) {
        entry.secondary_descriptors = detail::parse_sense_id_list(fields[2]);
      }
      if (!seen.insert(entry.id).second) {
        throw ParseError("duplicate sense id '" + entry.id.str() + "'");
      }
      entries.push_back(std::move(entry));
    } catch (const Error& e) {
      throw LexiconError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return SenseGraph::build(std::move(entries), strict);
}

inline SenseGraph load_lexicon_file(const std::filesystem::path& path,
                                    bool strict = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open lexicon file: " + path.string());
  return load_lexicon(in, strict);
}

/// Lemmas of up to `max_neighbors` direct neighbors of a sense, in priority
/// order: the primary descriptor first, then senses whose primary descriptor
/// is this sense, then secondary descriptors in stored order. Truncation
/// drops the lowest-priority neighbors. Edges to senses missing from the
/// graph (possible in non-strict mode) are skipped. Duplicate lemmas from
/// distinct senses are kept.
inline std::vector<std::string> neighborhood(const SenseGraph& graph,
                                             const SenseId& sense,
                                             std::size_t max_neighbors = 4) {
  const SenseEntry& entry = graph.at(sense);
  std::vector<std::string> out;
  const auto push = [&](const SenseId& neighbor) {
    if (out.size() < max_neighbors) out.push_back(neighbor.lemma);
  };
  if (entry.primary_descriptor && graph.contains(*entry.primary_descriptor)) {
    push(*entry.primary_descriptor);
  }
  for (const SenseId& child : graph.children(sense)) push(child);
  for (const SenseId& sd : entry.secondary_descriptors) {
    if (graph.contains(sd)) push(sd);
  }
  return out;
}

}  // namespace sensebench

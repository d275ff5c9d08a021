#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sensebench/baselines.hpp"
#include "sensebench/dataset.hpp"
#include "sensebench/detail/text.hpp"
#include "sensebench/errors.hpp"
#include "sensebench/sense_graph.hpp"

namespace sensebench {

struct PprParams {
  double damping = 0.85;
  double tolerance = 1e-8;       // L1 change between iterations
  int max_iterations = 100;
  /// When true, the target lemma's own senses stay in the teleport set
  /// built by ppr_disambiguate.
  bool include_target_candidates = false;
};

/// Personalized PageRank over the undirected view of the descriptor graph.
/// Primary and secondary descriptor edges are merged into a simple graph
/// (parallel edges collapse, edges to senses missing from a non-strict
/// graph are dropped) and the walk moves to a uniformly random neighbor.
/// Mass on isolated senses teleports. Builds adjacency once; score queries
/// are then safe to run concurrently.
class PprEngine {
 public:
  explicit PprEngine(const SenseGraph& graph) : graph_(&graph) {
    const std::vector<SenseId>& nodes = graph.nodes();
    index_.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      index_.emplace(nodes[i], static_cast<int>(i));
    }
    adjacency_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const SenseEntry& entry = graph.at(nodes[i]);
      std::vector<int> neighbors;
      const auto add = [&](const SenseId& other) {
        const auto it = index_.find(other);
        if (it != index_.end()) neighbors.push_back(it->second);
      };
      if (entry.primary_descriptor) add(*entry.primary_descriptor);
      for (const SenseId& child : graph.children(nodes[i])) add(child);
      for (const SenseId& sd : entry.secondary_descriptors) add(sd);
      // Incoming secondary-descriptor edges complete the undirected view.
      std::sort(neighbors.begin(), neighbors.end());
      neighbors.erase(std::unique(neighbors.begin(), neighbors.end()),
                      neighbors.end());
      adjacency_[i] = std::move(neighbors);
    }
    // children() covers inverse PD edges; inverse SD edges are added here.
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (const int j : adjacency_[i]) {
        auto& back = adjacency_[static_cast<std::size_t>(j)];
        if (!std::binary_search(back.begin(), back.end(), static_cast<int>(i))) {
          back.insert(std::lower_bound(back.begin(), back.end(), static_cast<int>(i)),
                      static_cast<int>(i));
        }
      }
    }
  }

  const SenseGraph& graph() const { return *graph_; }

  /// Stationary distribution of the teleporting walk; teleport mass is
  /// uniform over the (deduplicated) teleport set. Scores sum to 1.
  std::unordered_map<SenseId, double, SenseIdHash> scores(
      const std::vector<SenseId>& teleport, const PprParams& params = {}) const {
    if (teleport.empty()) throw GraphError("empty teleport set");
    std::vector<int> targets;
    targets.reserve(teleport.size());
    for (const SenseId& id : teleport) {
      const auto it = index_.find(id);
      if (it == index_.end()) {
        throw GraphError("teleport sense '" + id.str() + "' is not in the graph");
      }
      targets.push_back(it->second);
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

    const std::size_t n = adjacency_.size();
    std::vector<double> restart(n, 0.0);
    const double mass = 1.0 / static_cast<double>(targets.size());
    for (const int t : targets) restart[static_cast<std::size_t>(t)] = mass;

    std::vector<double> p = restart;
    std::vector<double> next(n, 0.0);
    const double d = params.damping;
    for (int iter = 0; iter < params.max_iterations; ++iter) {
      std::fill(next.begin(), next.end(), 0.0);
      double dangling = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (adjacency_[j].empty()) {
          dangling += p[j];
          continue;
        }
        const double share = p[j] / static_cast<double>(adjacency_[j].size());
        for (const int i : adjacency_[j]) {
          next[static_cast<std::size_t>(i)] += share;
        }
      }
      double l1 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = (1.0 - d) * restart[i] + d * (next[i] + dangling * restart[i]);
        l1 += std::abs(next[i] - p[i]);
      }
      p.swap(next);
      if (l1 < params.tolerance) break;
    }
    double sum = 0.0;
    for (const double v : p) sum += v;
    std::unordered_map<SenseId, double, SenseIdHash> out;
    out.reserve(n);
    const std::vector<SenseId>& nodes = graph_->nodes();
    for (std::size_t i = 0; i < n; ++i) out.emplace(nodes[i], p[i] / sum);
    return out;
  }

  /// Teleport set for an instance: every sense of every context token that
  /// resolves in the lexicon (verbatim, then Latin-lowercased), minus the
  /// target position and, unless configured otherwise, the target lemma's
  /// own senses and the candidate set.
  std::vector<SenseId> context_teleport(const Instance& instance,
                                        const PprParams& params = {}) const {
    std::unordered_set<SenseId, SenseIdHash> drop;
    if (!params.include_target_candidates) {
      for (const SenseId& c : instance.candidates) drop.insert(c);
      for (const SenseId& s : graph_->senses_of_lemma(instance.lemma)) drop.insert(s);
    }
    std::unordered_set<SenseId, SenseIdHash> seen;
    std::vector<SenseId> teleport;
    for (std::size_t si = 0; si < instance.sentences.size(); ++si) {
      const auto& sentence = instance.sentences[si];
      for (std::size_t ti = 0; ti < sentence.size(); ++ti) {
        if (static_cast<int>(si) == instance.target_sentence &&
            static_cast<int>(ti) == instance.target_token) {
          continue;
        }
        const std::vector<SenseId>* senses = &graph_->senses_of_lemma(sentence[ti]);
        if (senses->empty()) {
          senses = &graph_->senses_of_lemma(detail::lowercase_latin(sentence[ti]));
        }
        for (const SenseId& s : *senses) {
          if (drop.contains(s)) continue;
          if (seen.insert(s).second) teleport.push_back(s);
        }
      }
    }
    std::sort(teleport.begin(), teleport.end());
    return teleport;
  }

  /// Ranks the instance's candidates by their stationary probability under
  /// context personalization. Falls back to the first-sense heuristic when
  /// no context word resolves in the lexicon; exact ties go to the lower
  /// (lemma, sense_no) candidate.
  Prediction disambiguate(const Instance& instance, const PprParams& params = {}) const {
    const std::vector<SenseId> candidates = instance.sorted_candidates();
    for (const SenseId& c : candidates) {
      if (!graph_->contains(c)) {
        throw GraphError("candidate '" + c.str() + "' is not in the graph");
      }
    }
    const std::vector<SenseId> teleport = context_teleport(instance, params);
    if (teleport.empty()) {
      Prediction fallback = first_sense(instance);
      fallback.method = "ppr/first-sense-fallback";
      return fallback;
    }
    const auto all_scores = scores(teleport, params);
    Prediction out;
    out.method = "ppr";
    const SenseId* best = nullptr;
    double best_score = 0.0;
    for (const SenseId& c : candidates) {
      const double s = all_scores.at(c);
      out.scores.emplace(c, s);
      if (!best || s > best_score) {
        best = &c;
        best_score = s;
      }
    }
    out.chosen = *best;
    return out;
  }

 private:
  const SenseGraph* graph_;
  std::unordered_map<SenseId, int, SenseIdHash> index_;
  std::vector<std::vector<int>> adjacency_;
};

/// One-shot helpers matching the engine's queries.
inline std::unordered_map<SenseId, double, SenseIdHash> ppr_scores(
    const SenseGraph& graph, const std::vector<SenseId>& teleport,
    const PprParams& params = {}) {
  return PprEngine(graph).scores(teleport, params);
}

inline Prediction ppr_disambiguate(const SenseGraph& graph, const Instance& instance,
                                   const PprParams& params = {}) {
  return PprEngine(graph).disambiguate(instance, params);
}

}  // namespace sensebench

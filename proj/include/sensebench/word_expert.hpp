#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "sensebench/baselines.hpp"
#include "sensebench/dataset.hpp"
#include "sensebench/detail/io.hpp"
#include "sensebench/detail/rng.hpp"
#include "sensebench/detail/text.hpp"
#include "sensebench/errors.hpp"

namespace sensebench {

struct WordExpertConfig {
  int epochs = 50;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

/// One trained lemma: per-sense linear scorers over a binary bag-of-words
/// vocabulary built from that lemma's training contexts.
struct WordExpertModel {
  struct SenseClassifier {
    SenseId sense;
    std::vector<double> weights;  // indexed by vocabulary position
    double bias = 0.0;
  };

  std::string lemma;
  std::map<std::string, int> vocabulary;   // token -> feature index
  std::vector<SenseClassifier> classifiers;  // sorted by sense id
  WordExpertConfig config;

  const SenseClassifier* classifier_for(const SenseId& sense) const {
    for (const SenseClassifier& c : classifiers) {
      if (c.sense == sense) return &c;
    }
    return nullptr;
  }
};

namespace detail {

/// Binary bag of lowercased context tokens; the target token itself does
/// not vote. Returned sorted and deduplicated.
inline std::vector<std::string> bow_features(const Instance& instance) {
  std::vector<std::string> features;
  for (std::size_t si = 0; si < instance.sentences.size(); ++si) {
    const auto& sentence = instance.sentences[si];
    for (std::size_t ti = 0; ti < sentence.size(); ++ti) {
      if (static_cast<int>(si) == instance.target_sentence &&
          static_cast<int>(ti) == instance.target_token) {
        continue;
      }
      features.push_back(lowercase_latin(sentence[ti]));
    }
  }
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

inline std::vector<int> feature_indices(const WordExpertModel& model,
                                        const std::vector<std::string>& features) {
  std::vector<int> indices;
  indices.reserve(features.size());
  for (const std::string& f : features) {
    const auto it = model.vocabulary.find(f);
    if (it != model.vocabulary.end()) indices.push_back(it->second);
  }
  return indices;
}

}  // namespace detail

/// Hinge-loss SGD with L2 weight decay, one classifier per sense observed
/// in training (one-vs-rest). Instances are canonicalized by id before the
/// seeded per-epoch shuffles, so the model is independent of input order.
inline WordExpertModel train_word_expert(const std::string& lemma,
                                         std::vector<Instance> train_instances,
                                         const WordExpertConfig& config = {}) {
  if (train_instances.empty()) {
    throw DatasetError("no training instances for lemma '" + lemma + "'");
  }
  for (const Instance& inst : train_instances) {
    if (inst.lemma != lemma) {
      throw DatasetError("training instance '" + inst.id + "' has lemma '" +
                         inst.lemma + "', expected '" + lemma + "'");
    }
  }
  std::sort(train_instances.begin(), train_instances.end(),
            [](const Instance& a, const Instance& b) { return a.id < b.id; });

  WordExpertModel model;
  model.lemma = lemma;
  model.config = config;

  std::vector<std::vector<std::string>> features;
  features.reserve(train_instances.size());
  for (const Instance& inst : train_instances) {
    features.push_back(detail::bow_features(inst));
    for (const std::string& f : features.back()) {
      model.vocabulary.emplace(f, 0);
    }
  }
  int next_index = 0;
  for (auto& [token, index] : model.vocabulary) index = next_index++;

  std::vector<std::vector<int>> rows;
  rows.reserve(features.size());
  for (const auto& fs : features) {
    std::vector<int> row;
    row.reserve(fs.size());
    for (const std::string& f : fs) row.push_back(model.vocabulary.at(f));
    rows.push_back(std::move(row));
  }

  std::vector<SenseId> senses;
  for (const Instance& inst : train_instances) senses.push_back(inst.gold);
  std::sort(senses.begin(), senses.end());
  senses.erase(std::unique(senses.begin(), senses.end()), senses.end());

  const std::size_t dim = model.vocabulary.size();
  for (const SenseId& sense : senses) {
    WordExpertModel::SenseClassifier clf;
    clf.sense = sense;
    clf.weights.assign(dim, 0.0);

    detail::SplitMix64 rng(config.seed ^ detail::fnv1a64(lemma) ^
                           detail::fnv1a64(sense.str()));
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      detail::shuffle(order, rng);
      for (const std::size_t i : order) {
        const double y = train_instances[i].gold == sense ? 1.0 : -1.0;
        double score = clf.bias;
        for (const int f : rows[i]) score += clf.weights[static_cast<std::size_t>(f)];
        const double decay = 1.0 - config.learning_rate * config.l2;
        for (double& w : clf.weights) w *= decay;
        if (y * score < 1.0) {
          for (const int f : rows[i]) {
            clf.weights[static_cast<std::size_t>(f)] += config.learning_rate * y;
          }
          clf.bias += config.learning_rate * y;
        }
      }
    }
    model.classifiers.push_back(std::move(clf));
  }
  return model;
}

/// Scores the candidates that have a trained classifier and picks the best;
/// ties and missing coverage fall back to the first-sense heuristic. The
/// model may be null for lemmas never seen in training.
inline Prediction predict_word_expert(const WordExpertModel* model,
                                      const Instance& instance) {
  if (model != nullptr && model->lemma != instance.lemma) {
    throw DatasetError("word expert for '" + model->lemma +
                       "' applied to lemma '" + instance.lemma + "'");
  }
  if (model == nullptr || model->classifiers.empty()) {
    Prediction fallback = first_sense(instance);
    fallback.method = "word-expert/first-sense-fallback";
    return fallback;
  }
  const std::vector<int> indices =
      detail::feature_indices(*model, detail::bow_features(instance));

  Prediction out;
  out.method = "word-expert";
  const std::vector<SenseId> candidates = instance.sorted_candidates();
  const SenseId* best = nullptr;
  double best_score = 0.0;
  for (const SenseId& candidate : candidates) {
    const WordExpertModel::SenseClassifier* clf = model->classifier_for(candidate);
    if (clf == nullptr) continue;
    double score = clf->bias;
    for (const int f : indices) score += clf->weights[static_cast<std::size_t>(f)];
    out.scores.emplace(candidate, score);
    if (!best || score > best_score) {
      best = &candidate;
      best_score = score;
    }
  }
  if (!best) {
    Prediction fallback = first_sense(instance);
    fallback.method = "word-expert/first-sense-fallback";
    return fallback;
  }
  out.chosen = *best;
  return out;
}

inline Prediction predict_word_expert(const WordExpertModel& model,
                                      const Instance& instance) {
  return predict_word_expert(&model, instance);
}

inline constexpr int kWordExpertFormatVersion = 1;

inline nlohmann::json word_expert_to_json(const WordExpertModel& model) {
  nlohmann::json j;
  j["format"] = "word-expert";
  j["version"] = kWordExpertFormatVersion;
  j["lemma"] = model.lemma;
  j["config"] = {{"epochs", model.config.epochs},
                 {"learning_rate", model.config.learning_rate},
                 {"l2", model.config.l2},
                 {"seed", model.config.seed}};
  nlohmann::json vocab = nlohmann::json::array();
  std::vector<const std::string*> by_index(model.vocabulary.size());
  for (const auto& [token, index] : model.vocabulary) {
    by_index[static_cast<std::size_t>(index)] = &token;
  }
  for (const std::string* token : by_index) vocab.push_back(*token);
  j["vocabulary"] = std::move(vocab);
  nlohmann::json classifiers = nlohmann::json::array();
  for (const auto& clf : model.classifiers) {
    classifiers.push_back({{"sense_id", clf.sense.str()},
                           {"weights", clf.weights},
                           {"bias", clf.bias}});
  }
  j["classifiers"] = std::move(classifiers);
  return j;
}

inline WordExpertModel word_expert_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "word-expert") {
    throw ParseError("not a word-expert model file");
  }
  if (j.value("version", 0) != kWordExpertFormatVersion) {
    throw ParseError("unsupported word-expert model version");
  }
  WordExpertModel model;
  model.lemma = j.at("lemma").get<std::string>();
  const auto& cfg = j.at("config");
  model.config.epochs = cfg.at("epochs").get<int>();
  model.config.learning_rate = cfg.at("learning_rate").get<double>();
  model.config.l2 = cfg.at("l2").get<double>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  int index = 0;
  for (const auto& token : j.at("vocabulary")) {
    model.vocabulary.emplace(token.get<std::string>(), index++);
  }
  const std::size_t dim = model.vocabulary.size();
  for (const auto& cj : j.at("classifiers")) {
    WordExpertModel::SenseClassifier clf;
    clf.sense = SenseId::parse(cj.at("sense_id").get<std::string>());
    clf.weights = cj.at("weights").get<std::vector<double>>();
    clf.bias = cj.at("bias").get<double>();
    if (clf.weights.size() != dim) {
      throw ParseError("weight vector size does not match vocabulary");
    }
    model.classifiers.push_back(std::move(clf));
  }
  std::sort(model.classifiers.begin(), model.classifiers.end(),
            [](const auto& a, const auto& b) { return a.sense < b.sense; });
  return model;
}

inline void save_word_expert(const WordExpertModel& model,
                             const std::filesystem::path& path) {
  detail::write_file_atomic(path, word_expert_to_json(model).dump(2) + "\n");
}

inline WordExpertModel load_word_expert(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return word_expert_from_json(j);
}

/// Convenience for evaluation runs: one expert per lemma present in the
/// training split, trained independently.
inline std::map<std::string, WordExpertModel> train_word_experts(
    const std::vector<Instance>& train_instances, const WordExpertConfig& config = {}) {
  std::map<std::string, std::vector<Instance>> by_lemma;
  for (const Instance& inst : train_instances) by_lemma[inst.lemma].push_back(inst);
  std::map<std::string, WordExpertModel> experts;
  for (auto& [lemma, instances] : by_lemma) {
    experts.emplace(lemma, train_word_expert(lemma, std::move(instances), config));
  }
  return experts;
}

}  // namespace sensebench

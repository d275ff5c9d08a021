#pragma once

#include <stdexcept>
#include <string>

namespace sensebench {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (sense ids, records, replies).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Lexicon file problems: malformed lines, duplicates, dangling references.
class LexiconError : public Error {
 public:
  using Error::Error;
};

/// Instance or definition file problems.
class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Graph queries on unknown senses, bad teleport sets and the like.
class GraphError : public Error {
 public:
  using Error::Error;
};

/// Prompt construction and reply parsing problems.
class PromptError : public Error {
 public:
  using Error::Error;
};

/// A candidate sense has no entry in the definition inventory.
class MissingDefinitionError : public PromptError {
 public:
  explicit MissingDefinitionError(std::string sense)
      : PromptError("missing definition for sense '" + sense + "'"),
        sense_(std::move(sense)) {}

  const std::string& sense() const { return sense_; }

 private:
  std::string sense_;
};

/// Invalid run configuration (unknown provider, missing file, bad flag).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sensebench

#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "sensebench/detail/rng.hpp"
#include "sensebench/detail/text.hpp"
#include "sensebench/errors.hpp"

namespace sensebench {

/// A sense identifier, rendered as "lemma..n" (e.g. "ämne..2"). Lemmas may
/// contain spaces and single dots ("bryta upp", "m.m.") but never the ".."
/// separator. Ordering is (lemma, sense_no) ascending with bytewise lemma
/// comparison; this is the canonical order used for candidate lists,
/// tie-breaking and the first-sense heuristic.
struct SenseId {
  std::string lemma;
  int sense_no = 1;

  auto operator<=>(const SenseId&) const = default;

  std::string str() const { return lemma + ".." + std::to_string(sense_no); }

  /// True if text ends in "..<digits>". Used by the lexicon reader to find
  /// sense-id boundaries in space-separated descriptor lists, where lemmas
  /// themselves may contain spaces.
  static bool has_sense_suffix(std::string_view text) {
    const std::size_t pos = text.rfind("..");
    if (pos == std::string_view::npos || pos == 0) return false;
    const std::string_view digits = text.substr(pos + 2);
    if (digits.empty()) return false;
    for (const char c : digits) {
      if (!detail::is_ascii_digit(c)) return false;
    }
    return true;
  }

  static SenseId parse(std::string_view text) {
    const std::size_t pos = text.rfind("..");
    if (pos == std::string_view::npos || pos == 0) {
      throw ParseError("invalid sense id '" + std::string(text) +
                       "': expected \"lemma..n\"");
    }
    const std::string_view lemma = text.substr(0, pos);
    const std::string_view digits = text.substr(pos + 2);
    if (lemma.find("..") != std::string_view::npos) {
      throw ParseError("invalid sense id '" + std::string(text) +
                       "': lemma contains \"..\"");
    }
    if (lemma.find('\t') != std::string_view::npos ||
        lemma.find('\n') != std::string_view::npos) {
      throw ParseError("invalid sense id '" + std::string(text) +
                       "': lemma contains control characters");
    }
    if (digits.empty() || digits.size() > 9) {
      throw ParseError("invalid sense id '" + std::string(text) +
                       "': bad sense number");
    }
    int value = 0;
    for (const char c : digits) {
      if (!detail::is_ascii_digit(c)) {
        throw ParseError("invalid sense id '" + std::string(text) +
                         "': bad sense number");
      }
      value = value * 10 + (c - '0');
    }
    if (value < 1 || digits[0] == '0') {
      throw ParseError("invalid sense id '" + std::string(text) +
                       "': sense number must be a positive integer without "
                       "leading zeros");
    }
    return SenseId{std::string(lemma), value};
  }
};

struct SenseIdHash {
  std::size_t operator()(const SenseId& id) const noexcept {
    std::uint64_t h = detail::fnv1a64(id.lemma);
    h ^= static_cast<std::uint64_t>(id.sense_no) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace sensebench

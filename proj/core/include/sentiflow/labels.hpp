#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace sentiflow {

/// The four sentiment classes. The enumerator order is the fixed row/column
/// order used by confusion matrices and every CSV report.
enum class SentimentLabel : std::uint8_t { Sarcastic = 0, Neutral = 1, Negative = 2, Positive = 3 };

inline constexpr std::size_t kLabelCount = 4;

inline constexpr std::array<SentimentLabel, kLabelCount> kAllLabels = {
    SentimentLabel::Sarcastic, SentimentLabel::Neutral, SentimentLabel::Negative,
    SentimentLabel::Positive};

/// A classification outcome: a label, or std::nullopt for a reply that did
/// not reduce to exactly one label word ("unparsed").
using LabelOutcome = std::optional<SentimentLabel>;

inline constexpr std::size_t index_of(SentimentLabel label) {
  return static_cast<std::size_t>(label);
}

/// Lowercase English word ("positive", ...).
std::string_view to_string(SentimentLabel label);

/// Capitalized display name ("Positive", ...).
std::string_view display_name(SentimentLabel label);

/// Exact lowercase-word lookup; no decoration stripping.
std::optional<SentimentLabel> label_from_word(std::string_view word);

inline constexpr std::string_view kUnparsedWord = "unparsed";

std::string_view to_string(const LabelOutcome& outcome);

/// Inverse of to_string(LabelOutcome). Returns false for unknown words.
bool outcome_from_word(std::string_view word, LabelOutcome& out);

}  // namespace sentiflow

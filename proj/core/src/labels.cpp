#include "sentiflow/labels.hpp"

namespace sentiflow {

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Sarcastic:
      return "sarcastic";
    case SentimentLabel::Neutral:
      return "neutral";
    case SentimentLabel::Negative:
      return "negative";
    case SentimentLabel::Positive:
      return "positive";
  }
  return "unknown";
}

std::string_view display_name(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Sarcastic:
      return "Sarcastic";
    case SentimentLabel::Neutral:
      return "Neutral";
    case SentimentLabel::Negative:
      return "Negative";
    case SentimentLabel::Positive:
      return "Positive";
  }
  return "Unknown";
}

std::optional<SentimentLabel> label_from_word(std::string_view word) {
  for (auto label : kAllLabels) {
    if (to_string(label) == word) return label;
  }
  return std::nullopt;
}

std::string_view to_string(const LabelOutcome& outcome) {
  return outcome ? to_string(*outcome) : kUnparsedWord;
}

bool outcome_from_word(std::string_view word, LabelOutcome& out) {
  if (word == kUnparsedWord) {
    out = std::nullopt;
    return true;
  }
  if (auto label = label_from_word(word)) {
    out = label;
    return true;
  }
  return false;
}

}  // namespace sentiflow

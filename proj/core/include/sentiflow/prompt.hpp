#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sentiflow/error.hpp"
#include "sentiflow/labels.hpp"

namespace sentiflow {

struct FewShotExample {
  std::string post_text;
  SentimentLabel expected = SentimentLabel::Neutral;

  bool operator==(const FewShotExample&) const = default;
};

struct PromptBundle {
  /// Task description, criteria, worked examples and the closing cue.
  std::string system_instructions;
  std::vector<FewShotExample> examples;
  /// The post being classified, unmodified.
  std::string query_post;

  bool operator==(const PromptBundle&) const = default;
};

class EmptyPostError : public Error {
 public:
  EmptyPostError() : Error("post is empty after trimming") {}
};

/// The five hand-labeled Weibo posts shipped as the default example set.
const std::vector<FewShotExample>& default_examples();

/// Throws EmptyPostError when `post` is blank. Reposts keep their
/// "[reply]//[original]" shape.
PromptBundle build_prompt(std::string_view post,
                          const std::vector<FewShotExample>& examples = default_examples());

/// Reduce a model reply to a label: case-fold, strip surrounding whitespace,
/// quotes and terminal punctuation, then require an exact label word.
LabelOutcome parse_label(std::string_view raw);

/// Load {"post": ..., "label": ...} lines. Throws ConfigError on bad input.
std::vector<FewShotExample> load_examples(const std::filesystem::path& path);

}  // namespace sentiflow

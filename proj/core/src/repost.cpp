#include "sentiflow/repost.hpp"

#include "sentiflow/normalize.hpp"

namespace sentiflow {
namespace {

constexpr std::string_view kSeparator = "//";

std::size_t find_separator(std::string_view text, std::size_t from = 0) {
  for (auto pos = text.find(kSeparator, from); pos != std::string_view::npos;
       pos = text.find(kSeparator, pos + 1)) {
    if (pos > 0 && text[pos - 1] == ':') continue;
    return pos;
  }
  return std::string_view::npos;
}

bool ends_with_separator(std::string_view text) {
  if (text.size() < kSeparator.size() || text.substr(text.size() - 2) != kSeparator) return false;
  // "http://" alone is a URL fragment, not a repost marker.
  return !(text.size() > 2 && text[text.size() - 3] == ':');
}

}  // namespace

std::optional<RepostSplit> split_at_separator(std::string_view text) {
  auto trimmed = trim_unicode(text);
  auto pos = find_separator(trimmed);
  if (pos == std::string_view::npos) return std::nullopt;
  RepostSplit split;
  split.reply = std::string(trimmed.substr(0, pos));
  auto rest = trimmed.substr(pos + kSeparator.size());
  if (!rest.empty()) split.original = std::string(rest);
  return split;
}

RepostDetection detect_repost(const PostRecord& record, const RepostRules& rules) {
  RepostDetection out;
  if (rules.metadata && record.has_repost_metadata()) {
    out.is_repost = true;
    out.split = RepostSplit{record.content, record.repost_content};
    return out;
  }
  auto trimmed = trim_unicode(record.content);
  bool marked = rules.trailing_slashes && ends_with_separator(trimmed);
  if (!marked && rules.inline_mention) marked = trimmed.find("//@") != std::string_view::npos;
  if (!marked) return out;
  out.is_repost = true;
  out.split = split_at_separator(trimmed);
  return out;
}

}  // namespace sentiflow

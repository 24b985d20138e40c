#pragma once

#include <optional>
#include <string>

#include "sentiflow/ingest.hpp"

namespace sentiflow {

/// A repost's content split at the first "//" separator.
struct RepostSplit {
  std::string reply;
  std::optional<std::string> original;

  bool operator==(const RepostSplit&) const = default;
};

struct RepostRules {
  /// Any repost_* metadata field marks the post as a repost.
  bool metadata = true;
  /// Trimmed content ending in "//" marks a repost.
  bool trailing_slashes = true;
  /// Content containing "//@" anywhere marks a repost. Off by default.
  bool inline_mention = false;
};

struct RepostDetection {
  bool is_repost = false;
  std::optional<RepostSplit> split;
};

RepostDetection detect_repost(const PostRecord& record, const RepostRules& rules = {});

/// Split trimmed text at its first "//" separator. A "//" directly after ':'
/// (a URL scheme such as "http://") is not a separator. Returns nullopt when
/// no separator exists.
std::optional<RepostSplit> split_at_separator(std::string_view text);

}  // namespace sentiflow

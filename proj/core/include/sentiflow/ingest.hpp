#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sentiflow/timestamp.hpp"

namespace sentiflow {

/// One dataset row.
struct PostRecord {
  std::string weibo_id;
  std::string user_id;
  std::string content;
  Instant timestamp{};
  std::optional<std::string> source_device;
  std::optional<std::string> repost_content;
  std::optional<std::vector<std::string>> repost_images;
  std::optional<Instant> repost_timestamp;
  std::optional<std::string> repost_username;

  bool has_repost_metadata() const {
    return repost_content || repost_images || repost_timestamp || repost_username;
  }

  bool operator==(const PostRecord&) const = default;
};

enum class RecordErrorKind { MalformedJson, MissingRequiredField, InvalidField, BadTimestamp };

struct RecordError {
  RecordErrorKind kind = RecordErrorKind::MalformedJson;
  std::string field;   ///< canonical field name, when the error concerns one
  std::string detail;
  std::size_t line_no = 0;

  /// Short machine-readable reason, e.g. "missing_field:weibo_id".
  std::string reason() const;
};

enum class Field {
  WeiboId,
  UserId,
  Content,
  Timestamp,
  From,
  RepostContent,
  RepostImages,
  RepostTimestamp,
  RepostUsername,
};

/// snake_case name used in reasons and config ("weibo_id", "repost_content", ...).
std::string_view field_name(Field field);
std::optional<Field> field_from_name(std::string_view name);

/// JSON keys accepted for each field, tried in order. Defaults are the
/// dataset's display names ("Weibo_ID", "Repost - Content", ...).
struct FieldKeys {
  std::map<Field, std::vector<std::string>> keys;

  static FieldKeys defaults();
  void add_alias(Field field, std::string key);
  const std::vector<std::string>& operator[](Field field) const;
};

struct IngestOptions {
  FieldKeys fields = FieldKeys::defaults();
  TimestampOptions timestamps;
};

using ParseResult = std::variant<PostRecord, RecordError>;

ParseResult parse_record(std::string_view line, const IngestOptions& options = {});

/// One-line JSON using the default keys; parse_record() of the output yields
/// an equal record.
std::string serialize_record(const PostRecord& record);

struct IngestStats {
  std::size_t total_lines = 0;
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejection_reasons;
};

/// Streams newline-delimited JSON one line at a time. Memory use is bounded by
/// the longest line. Rejected lines are optionally written to `error_sink` as
/// "line_no<TAB>reason".
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path, IngestOptions options = {},
                        std::ostream* error_sink = nullptr);

  /// Next record or per-line error; std::nullopt at end of file.
  std::optional<ParseResult> next();

  const IngestStats& stats() const { return stats_; }

 private:
  std::ifstream in_;
  IngestOptions options_;
  std::ostream* error_sink_;
  IngestStats stats_;
  std::string line_;
};

struct LoadedCorpus {
  std::vector<PostRecord> records;
  IngestStats stats;
};

/// Reads a whole file. When `error_sidecar` is given, rejected lines are
/// logged there.
LoadedCorpus load_corpus(const std::filesystem::path& path, const IngestOptions& options = {},
                         const std::optional<std::filesystem::path>& error_sidecar = std::nullopt);

}  // namespace sentiflow

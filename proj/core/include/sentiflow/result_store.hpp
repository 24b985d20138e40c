#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentiflow/labels.hpp"
#include "sentiflow/timestamp.hpp"

namespace sentiflow {

struct ClassificationRecord {
  std::string weibo_id;
  LabelOutcome label;
  /// Untouched model reply; empty for inherited records and failed requests.
  std::string raw_output;
  /// Classification queries issued for this post (0 when inherited).
  int attempts = 0;
  /// Canonical weibo_id for a duplicate's inherited label.
  std::optional<std::string> inherited_from;
  Instant classified_at{};
  std::string model_name;
  /// Transport or protocol failure note.
  std::optional<std::string> error;

  bool operator==(const ClassificationRecord&) const = default;
};

nlohmann::json to_json(const ClassificationRecord& record);
/// Throws sentiflow::Error when required keys are missing or mistyped.
ClassificationRecord record_from_json(const nlohmann::json& doc);

/// Append-only newline-delimited JSON log of classification records. Reading
/// is latest-wins per weibo_id. On open, a torn final line left by a crash is
/// cut off before new records are appended.
class ResultStore {
 public:
  /// Loads (or creates) the store file. Throws IoError.
  static ResultStore open(const std::filesystem::path& path);
  /// A store with no backing file, for tests and dry runs.
  static ResultStore in_memory();

  ResultStore(ResultStore&&) noexcept = default;
  ResultStore& operator=(ResultStore&&) noexcept = default;

  /// Appends and flushes. Throws IoError on write failure.
  void append(std::span<const ClassificationRecord> records);
  void append(const ClassificationRecord& record) { append(std::span(&record, 1)); }

  /// Effective (latest) record for a post.
  const ClassificationRecord* find(std::string_view weibo_id) const;
  std::size_t size() const { return effective_.size(); }
  /// Effective records sorted by weibo_id.
  std::vector<ClassificationRecord> effective_records() const;

  /// Lines appended since the store was opened.
  std::size_t appended() const { return appended_; }
  /// Unreadable lines skipped while loading.
  std::size_t skipped_lines() const { return skipped_lines_; }
  /// Bytes cut from a torn final line while loading.
  std::size_t repaired_bytes() const { return repaired_bytes_; }

 private:
  ResultStore() = default;
  void apply(ClassificationRecord record);

  std::optional<std::filesystem::path> path_;
  std::ofstream out_;
  std::unordered_map<std::string, ClassificationRecord> effective_;
  std::size_t appended_ = 0;
  std::size_t skipped_lines_ = 0;
  std::size_t repaired_bytes_ = 0;
};

}  // namespace sentiflow

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentiflow/error.hpp"
#include "sentiflow/ingest.hpp"
#include "sentiflow/repost.hpp"

namespace sentiflow {

enum class PostKindTag : std::uint8_t { Distinct, Duplicate, Repost };

std::string_view to_string(PostKindTag tag);
std::optional<PostKindTag> post_kind_from_name(std::string_view name);

struct PostKind {
  PostKindTag tag = PostKindTag::Distinct;
  /// weibo_id of the Distinct post this one duplicates; empty otherwise.
  std::string canonical_id;

  bool operator==(const PostKind&) const = default;
};

struct KindCounts {
  std::size_t distinct = 0;
  std::size_t duplicate = 0;
  std::size_t repost = 0;

  std::size_t total() const { return distinct + duplicate + repost; }
  bool operator==(const KindCounts&) const = default;
};

struct PartitionEntry {
  std::string weibo_id;
  PostKind kind;
  /// Position of the post in the sequence passed to partition().
  std::size_t record_index = 0;
};

class DuplicateWeiboIdError : public Error {
 public:
  explicit DuplicateWeiboIdError(const std::string& id)
      : Error("duplicate weibo_id in corpus: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

/// The distinct / duplicate / repost split of a corpus.
class CorpusPartition {
 public:
  CorpusPartition() = default;
  CorpusPartition(std::vector<PartitionEntry> entries, KindCounts counts);
  CorpusPartition(const CorpusPartition& other) : CorpusPartition(other.entries_, other.counts_) {}
  CorpusPartition& operator=(const CorpusPartition& other);
  CorpusPartition(CorpusPartition&&) noexcept = default;
  CorpusPartition& operator=(CorpusPartition&&) noexcept = default;

  /// Entries ordered by (timestamp, weibo_id).
  const std::vector<PartitionEntry>& entries() const { return entries_; }
  const KindCounts& counts() const { return counts_; }
  const PartitionEntry* find(std::string_view weibo_id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  void build_index();

  std::vector<PartitionEntry> entries_;
  KindCounts counts_;
  std::unordered_map<std::string_view, std::size_t> index_;
};

struct PartitionOptions {
  RepostRules repost_rules;
  /// Threads used for normalization and hashing. Output is independent of it.
  unsigned workers = 1;
};

/// 128-bit digest of normalized content.
using ContentDigest = std::array<std::uint64_t, 2>;
ContentDigest content_digest(std::string_view normalized);

/// Classify every record. Reposts never count as duplicates; among the rest,
/// the first post (by timestamp, then weibo_id) of each normalized-content
/// value is Distinct and later ones are Duplicate of it.
/// Throws DuplicateWeiboIdError.
CorpusPartition partition(std::span<const PostRecord> records, const PartitionOptions& options = {});

/// "kind,count,fraction" rows for distinct, duplicate, repost.
void write_partition_summary_csv(std::ostream& out, const CorpusPartition& partition);

/// One {"weibo_id","kind","canonical_id"?} object per line, partition order.
void write_assignments_ndjson(std::ostream& out, const CorpusPartition& partition);

}  // namespace sentiflow

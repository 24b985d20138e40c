#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sentiflow/inference_client.hpp"
#include "sentiflow/ingest.hpp"
#include "sentiflow/partition.hpp"
#include "sentiflow/prompt.hpp"
#include "sentiflow/repost.hpp"
#include "sentiflow/result_store.hpp"

namespace sentiflow {

struct ClassifyOptions {
  std::vector<FewShotExample> examples = default_examples();
  RepostRules repost_rules;
  /// Posts submitted per batch; the store is flushed after each batch.
  std::size_t batch_size = 64;
  /// Source of classified_at values.
  std::function<Instant()> clock = [] {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  };
};

struct RunSummary {
  std::size_t posts_total = 0;
  std::size_t model_calls = 0;
  std::size_t inherited = 0;
  /// Replies that stayed unparseable after the automatic re-query.
  std::size_t unparsed = 0;
  /// Requests that failed (transport, protocol, auth) or posts with no text.
  std::size_t errors = 0;
  /// Distinct posts and reposts skipped because the store already held them.
  std::size_t resumed = 0;
  std::chrono::milliseconds wall_time{0};
};

/// Text sent to the model: the post content, with the reposted original
/// appended as "[reply]//[original]" when it only exists as metadata.
std::string classification_text(const PostRecord& record, const RepostRules& rules = {});

/// Label every post in the partition. Distinct posts and reposts are sent to
/// the model (one automatic re-query on an unparseable reply); duplicates
/// inherit their canonical post's label. Posts already in the store are
/// skipped. Throws IoError on store failure only.
RunSummary classify_corpus(const CorpusPartition& partition, std::span<const PostRecord> records,
                           const InferenceClient& client, ResultStore& store,
                           const ClassifyOptions& options = {});

struct RequerySummary {
  std::size_t rounds = 0;
  std::size_t model_calls = 0;
  std::size_t resolved = 0;
  std::size_t still_unparsed = 0;
  /// Inherited records rewritten after their canonical post resolved.
  std::size_t propagated = 0;
};

/// Re-submit every unparsed, non-inherited record up to `max_rounds` times.
/// Resolutions are appended (latest wins) and pushed to inheriting duplicates.
RequerySummary requery_unparsed(ResultStore& store, const CorpusPartition& partition,
                                std::span<const PostRecord> records, const InferenceClient& client,
                                std::size_t max_rounds, const ClassifyOptions& options = {});

/// Header plus one row: posts_total,model_calls,inherited,unparsed,errors,wall_time.
void write_run_summary_csv(std::ostream& out, const RunSummary& summary);

}  // namespace sentiflow

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sentiflow/error.hpp"
#include "sentiflow/labels.hpp"
#include "sentiflow/partition.hpp"
#include "sentiflow/timestamp.hpp"

namespace sentiflow {

class TimelineError : public Error {
 public:
  using Error::Error;
};

enum class Resolution { Week, Day };
std::optional<Resolution> resolution_from_name(std::string_view name);

struct LabeledPost {
  Instant timestamp{};
  SentimentLabel label = SentimentLabel::Neutral;
  PostKindTag kind = PostKindTag::Distinct;
};

/// Inclusive UTC calendar-date bounds. A missing bound defaults to the
/// earliest / latest post.
struct DateRange {
  std::optional<Date> from;
  std::optional<Date> to;
};

using LabelCounts = std::array<std::uint64_t, kLabelCount>;

struct TimelineBucket {
  /// Monday of the ISO week, or the day itself at daily resolution.
  Date start{};
  LabelCounts counts{};

  std::uint64_t total() const;
};

struct TimelineSeries {
  Resolution resolution = Resolution::Week;
  /// Strictly increasing and gap-free between the range bounds.
  std::vector<TimelineBucket> buckets;
};

/// Monday on or before `d`.
Date iso_week_start(Date d);

/// Count posts per bucket. Every bucket inside the range is emitted, empty
/// ones with zero counts. Throws TimelineError for an empty range.
TimelineSeries bucket_weekly(std::span<const LabeledPost> posts, const DateRange& range = {},
                             Resolution resolution = Resolution::Week);

struct BucketFractions {
  Date start{};
  /// Absent for a bucket with no posts.
  std::optional<std::array<double, kLabelCount>> fractions;
};

std::vector<BucketFractions> percentage_series(const TimelineSeries& series);

enum class ShareScope { All, Distinct };
std::string_view to_string(ShareScope scope);
std::optional<ShareScope> share_scope_from_name(std::string_view name);

struct ShareBreakdown {
  ShareScope scope = ShareScope::All;
  std::array<double, kLabelCount> fractions{};
  std::uint64_t total = 0;
};

/// Label shares. ShareScope::Distinct drops duplicates and, unless
/// `reposts_in_distinct` is false, keeps reposts. Throws TimelineError when
/// the selection is empty.
ShareBreakdown sentiment_shares(std::span<const LabeledPost> posts, ShareScope scope,
                                bool reposts_in_distinct = true);

/// True when the post belongs to the given scope.
bool in_scope(const LabeledPost& post, ShareScope scope, bool reposts_in_distinct = true);

/// {week_start|day},sarcastic,neutral,negative,positive
void write_counts_csv(std::ostream& out, const TimelineSeries& series);
void write_fractions_csv(std::ostream& out, const TimelineSeries& series);
/// scope,label,fraction
void write_shares_csv(std::ostream& out, std::span<const ShareBreakdown> shares);

}  // namespace sentiflow

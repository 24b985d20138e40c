#include "sentiflow/timeline.hpp"

#include <algorithm>
#include <ostream>

#include "sentiflow/csv.hpp"

namespace sentiflow {
namespace {

using namespace std::chrono;

Date bucket_of(Date d, Resolution r) { return r == Resolution::Week ? iso_week_start(d) : d; }

days step(Resolution r) { return r == Resolution::Week ? days{7} : days{1}; }

std::vector<std::string> header(const TimelineSeries& series) {
  std::vector<std::string> h = {series.resolution == Resolution::Week ? "week_start" : "day"};
  for (auto l : kAllLabels) h.emplace_back(to_string(l));
  return h;
}

}  // namespace

std::optional<Resolution> resolution_from_name(std::string_view name) {
  if (name == "week") return Resolution::Week;
  if (name == "day") return Resolution::Day;
  return std::nullopt;
}

std::uint64_t TimelineBucket::total() const {
  std::uint64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

Date iso_week_start(Date d) {
  const weekday wd{d};
  return d - days{wd.iso_encoding() - 1};
}

TimelineSeries bucket_weekly(std::span<const LabeledPost> posts, const DateRange& range,
                             Resolution resolution) {
  std::optional<Date> lo = range.from;
  std::optional<Date> hi = range.to;
  if (!lo || !hi) {
    for (const auto& p : posts) {
      const Date d = floor<days>(p.timestamp);
      if (range.from && d < *range.from) continue;
      if (range.to && d > *range.to) continue;
      if (!range.from) lo = lo ? std::min(*lo, d) : d;
      if (!range.to) hi = hi ? std::max(*hi, d) : d;
    }
  }
  if (!lo || !hi || *lo > *hi) throw TimelineError("empty date range");

  TimelineSeries series;
  series.resolution = resolution;
  const Date first = bucket_of(*lo, resolution);
  const Date last = bucket_of(*hi, resolution);
  for (Date b = first; b <= last; b += step(resolution)) series.buckets.push_back({b, {}});

  const auto width = step(resolution).count();
  for (const auto& p : posts) {
    const Date d = floor<days>(p.timestamp);
    if (d < *lo || d > *hi) continue;
    const auto slot = (bucket_of(d, resolution) - first).count() / width;
    ++series.buckets[static_cast<std::size_t>(slot)].counts[index_of(p.label)];
  }
  return series;
}

std::vector<BucketFractions> percentage_series(const TimelineSeries& series) {
  std::vector<BucketFractions> out;
  out.reserve(series.buckets.size());
  for (const auto& b : series.buckets) {
    BucketFractions f{b.start, std::nullopt};
    if (const auto total = b.total(); total > 0) {
      std::array<double, kLabelCount> fr{};
      for (std::size_t i = 0; i < kLabelCount; ++i) {
        fr[i] = static_cast<double>(b.counts[i]) / static_cast<double>(total);
      }
      f.fractions = fr;
    }
    out.push_back(f);
  }
  return out;
}

std::string_view to_string(ShareScope scope) {
  return scope == ShareScope::All ? "all" : "distinct";
}

std::optional<ShareScope> share_scope_from_name(std::string_view name) {
  if (name == "all") return ShareScope::All;
  if (name == "distinct") return ShareScope::Distinct;
  return std::nullopt;
}

bool in_scope(const LabeledPost& post, ShareScope scope, bool reposts_in_distinct) {
  if (scope == ShareScope::All) return true;
  if (post.kind == PostKindTag::Duplicate) return false;
  return post.kind == PostKindTag::Distinct || reposts_in_distinct;
}

ShareBreakdown sentiment_shares(std::span<const LabeledPost> posts, ShareScope scope,
                                bool reposts_in_distinct) {
  LabelCounts counts{};
  ShareBreakdown out;
  out.scope = scope;
  for (const auto& p : posts) {
    if (!in_scope(p, scope, reposts_in_distinct)) continue;
    ++counts[index_of(p.label)];
    ++out.total;
  }
  if (out.total == 0) throw TimelineError("no posts in scope " + std::string(to_string(scope)));
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    out.fractions[i] = static_cast<double>(counts[i]) / static_cast<double>(out.total);
  }
  return out;
}

void write_counts_csv(std::ostream& out, const TimelineSeries& series) {
  csv::write_row(out, header(series));
  for (const auto& b : series.buckets) {
    std::vector<std::string> row = {format_date(b.start)};
    for (auto c : b.counts) row.push_back(std::to_string(c));
    csv::write_row(out, row);
  }
}

void write_fractions_csv(std::ostream& out, const TimelineSeries& series) {
  csv::write_row(out, header(series));
  for (const auto& f : percentage_series(series)) {
    std::vector<std::string> row = {format_date(f.start)};
    for (std::size_t i = 0; i < kLabelCount; ++i) {
      row.push_back(f.fractions ? csv::format_fixed((*f.fractions)[i], 6) : "");
    }
    csv::write_row(out, row);
  }
}

void write_shares_csv(std::ostream& out, std::span<const ShareBreakdown> shares) {
  csv::write_row(out, {"scope", "label", "fraction"});
  for (const auto& s : shares) {
    for (auto l : kAllLabels) {
      csv::write_row(out, {std::string(to_string(s.scope)), std::string(to_string(l)),
                           csv::format_fixed(s.fractions[index_of(l)], 6)});
    }
  }
}

}  // namespace sentiflow

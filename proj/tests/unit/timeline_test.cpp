#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sentiflow/timeline.hpp"

using namespace sentiflow;
using namespace std::chrono;
using S = SentimentLabel;

namespace {

LabeledPost at(const char* when, S label, PostKindTag kind = PostKindTag::Distinct) {
  return {*parse_timestamp(when), label, kind};
}

Date date_of(const char* d) { return *parse_date(d); }

}  // namespace

TEST(Timeline, IsoWeekStart) {
  EXPECT_EQ(format_date(iso_week_start(date_of("2020-01-23"))), "2020-01-20");
  EXPECT_EQ(format_date(iso_week_start(date_of("2020-01-20"))), "2020-01-20");
  EXPECT_EQ(format_date(iso_week_start(date_of("2020-01-26"))), "2020-01-20");
  // ISO week crossing a year boundary
  EXPECT_EQ(format_date(iso_week_start(date_of("2020-01-01"))), "2019-12-30");
}

TEST(Timeline, MondayAndSundaySameBucket) {
  std::vector<LabeledPost> posts = {at("2020-01-20 00:00", S::Neutral),
                                    at("2020-01-26 23:59", S::Positive)};
  auto s = bucket_weekly(posts);
  ASSERT_EQ(s.buckets.size(), 1u);
  EXPECT_EQ(s.buckets[0].total(), 2u);
  EXPECT_EQ(format_date(s.buckets[0].start), "2020-01-20");
}

TEST(Timeline, ThreeWeekFixture) {
  std::vector<LabeledPost> posts = {
      at("2020-02-03 08:00", S::Negative), at("2020-02-04 08:00", S::Negative),
      at("2020-02-09 08:00", S::Sarcastic),
      // week 2 is empty
      at("2020-02-17 08:00", S::Positive), at("2020-02-18 08:00", S::Positive),
      at("2020-02-23 08:00", S::Neutral), at("2020-02-23 09:00", S::Positive)};
  auto s = bucket_weekly(posts);
  ASSERT_EQ(s.buckets.size(), 3u);
  EXPECT_EQ(s.buckets[0].counts, (LabelCounts{1, 0, 2, 0}));
  EXPECT_EQ(s.buckets[1].counts, (LabelCounts{0, 0, 0, 0}));
  EXPECT_EQ(s.buckets[2].counts, (LabelCounts{0, 1, 0, 3}));
  auto f = percentage_series(s);
  EXPECT_FALSE(f[1].fractions);
  ASSERT_TRUE(f[2].fractions);
  EXPECT_EQ((*f[2].fractions)[index_of(S::Positive)], 0.75);
  EXPECT_EQ((*f[2].fractions)[index_of(S::Neutral)], 0.25);
}

TEST(Timeline, RangeFilter) {
  std::vector<LabeledPost> posts = {at("2019-10-31 23:59", S::Neutral), at("2019-11-01 00:00", S::Neutral),
                                    at("2020-03-31 23:59", S::Negative), at("2020-04-01 00:00", S::Negative)};
  DateRange range{date_of("2019-11-01"), date_of("2020-03-31")};
  auto s = bucket_weekly(posts, range);
  std::uint64_t total = 0;
  for (const auto& b : s.buckets) total += b.total();
  EXPECT_EQ(total, 2u);
  EXPECT_EQ(format_date(s.buckets.front().start), "2019-10-28");
  EXPECT_EQ(format_date(s.buckets.back().start), "2020-03-30");
}

TEST(Timeline, DailyResolution) {
  std::vector<LabeledPost> posts = {at("2020-01-20 10:00", S::Neutral), at("2020-01-22 10:00", S::Positive)};
  auto s = bucket_weekly(posts, {}, Resolution::Day);
  ASSERT_EQ(s.buckets.size(), 3u);
  EXPECT_EQ(s.buckets[1].total(), 0u);
  std::ostringstream out;
  write_counts_csv(out, s);
  EXPECT_EQ(out.str().substr(0, 4), "day,");
}

TEST(Timeline, EmptyRangeThrows) {
  EXPECT_THROW(bucket_weekly(std::vector<LabeledPost>{}), TimelineError);
  std::vector<LabeledPost> posts = {at("2020-01-20 10:00", S::Neutral)};
  EXPECT_THROW(bucket_weekly(posts, {date_of("2020-02-01"), date_of("2020-01-01")}), TimelineError);
}

TEST(Timeline, CsvOutputs) {
  std::vector<LabeledPost> posts = {at("2020-01-20 10:00", S::Positive), at("2020-01-21 10:00", S::Positive),
                                    at("2020-01-21 11:00", S::Positive), at("2020-01-22 10:00", S::Neutral)};
  auto s = bucket_weekly(posts);
  std::ostringstream counts, fractions;
  write_counts_csv(counts, s);
  write_fractions_csv(fractions, s);
  EXPECT_EQ(counts.str(), "week_start,sarcastic,neutral,negative,positive\n2020-01-20,0,1,0,3\n");
  EXPECT_EQ(fractions.str(),
            "week_start,sarcastic,neutral,negative,positive\n2020-01-20,0.000000,0.250000,0.000000,0.750000\n");
}

TEST(Shares, OnePerLabel) {
  std::vector<LabeledPost> posts;
  for (auto l : kAllLabels) posts.push_back(at("2020-01-20 10:00", l));
  auto s = sentiment_shares(posts, ShareScope::All);
  for (double f : s.fractions) EXPECT_EQ(f, 0.25);
}

TEST(Shares, DistinctScopeDropsDuplicates) {
  std::vector<LabeledPost> posts = {
      at("2020-01-20 10:00", S::Positive), at("2020-01-20 11:00", S::Negative),
      at("2020-01-20 12:00", S::Negative, PostKindTag::Duplicate),
      at("2020-01-20 13:00", S::Negative, PostKindTag::Duplicate)};
  auto all = sentiment_shares(posts, ShareScope::All);
  auto distinct = sentiment_shares(posts, ShareScope::Distinct);
  EXPECT_EQ(all.fractions[index_of(S::Negative)], 0.75);
  EXPECT_EQ(all.fractions[index_of(S::Positive)], 0.25);
  EXPECT_EQ(distinct.fractions[index_of(S::Negative)], 0.5);
  EXPECT_EQ(distinct.fractions[index_of(S::Positive)], 0.5);
  EXPECT_EQ(distinct.total, 2u);
}

TEST(Shares, RepostsInDistinctScope) {
  std::vector<LabeledPost> posts = {at("2020-01-20 10:00", S::Positive),
                                    at("2020-01-20 11:00", S::Negative, PostKindTag::Repost)};
  EXPECT_EQ(sentiment_shares(posts, ShareScope::Distinct).total, 2u);
  EXPECT_EQ(sentiment_shares(posts, ShareScope::Distinct, false).total, 1u);
  std::vector<LabeledPost> dups = {at("2020-01-20 10:00", S::Positive, PostKindTag::Duplicate)};
  EXPECT_THROW(sentiment_shares(dups, ShareScope::Distinct), TimelineError);
}

TEST(Timeline, RandomFixtureProperties) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long long> secs(1'567'296'000, 1'585'699'199);
  std::uniform_int_distribution<int> label(0, 3), kind(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LabeledPost> posts;
    for (int i = 0; i < 500; ++i) {
      posts.push_back({sys_seconds{seconds{secs(rng)}}, kAllLabels[label(rng)],
                       static_cast<PostKindTag>(kind(rng))});
    }
    DateRange range{date_of("2019-10-01"), date_of("2020-02-29")};
    auto s = bucket_weekly(posts, range);
    std::uint64_t in_range = 0;
    for (const auto& p : posts) {
      auto d = floor<days>(p.timestamp);
      in_range += d >= *range.from && d <= *range.to;
    }
    std::uint64_t counted = 0;
    for (std::size_t i = 0; i < s.buckets.size(); ++i) {
      counted += s.buckets[i].total();
      if (i > 0) EXPECT_EQ(s.buckets[i].start - s.buckets[i - 1].start, days{7});
    }
    EXPECT_EQ(counted, in_range);
    auto fr = percentage_series(s);
    for (std::size_t i = 0; i < fr.size(); ++i) {
      if (!fr[i].fractions) {
        EXPECT_EQ(s.buckets[i].total(), 0u);
        continue;
      }
      double sum = 0;
      for (std::size_t l = 0; l < kLabelCount; ++l) {
        sum += (*fr[i].fractions)[l];
        EXPECT_EQ(std::llround((*fr[i].fractions)[l] * double(s.buckets[i].total())),
                  static_cast<long long>(s.buckets[i].counts[l]));
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "sentiflow/error.hpp"
#include "sentiflow/ingest.hpp"

using namespace sentiflow;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  auto dir = fs::temp_directory_path() / "sentiflow_ingest_test";
  fs::create_directories(dir);
  auto p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

}  // namespace

TEST(ParseRecord, DirectMapping) {
  auto r = parse_record(
      R"({"Weibo_ID":"w1","User_ID":"u1","Content":"你好","Timestamp":"2020-01-23 10:00"})");
  ASSERT_TRUE(std::holds_alternative<PostRecord>(r));
  const auto& p = std::get<PostRecord>(r);
  EXPECT_EQ(p.weibo_id, "w1");
  EXPECT_EQ(p.user_id, "u1");
  EXPECT_EQ(p.content, "你好");
  EXPECT_FALSE(p.has_repost_metadata());
}

TEST(ParseRecord, MissingWeiboId) {
  auto r = parse_record(R"({"Content":"x"})");
  ASSERT_TRUE(std::holds_alternative<RecordError>(r));
  EXPECT_EQ(std::get<RecordError>(r).kind, RecordErrorKind::MissingRequiredField);
  EXPECT_EQ(std::get<RecordError>(r).field, "weibo_id");
}

TEST(ParseRecord, RepostFields) {
  auto r = parse_record(
      R"({"Weibo_ID":"w2","User_ID":"u","Content":"转发","Timestamp":1579776000,)"
      R"("Repost - Content":"原文","Repost - Imgs":["a.jpg"],"Repost - Username":"orig",)"
      R"("Repost - Timestamp":"2020-01-22 09:00","From":"iPhone"})");
  ASSERT_TRUE(std::holds_alternative<PostRecord>(r));
  const auto& p = std::get<PostRecord>(r);
  EXPECT_EQ(p.repost_content, "原文");
  ASSERT_TRUE(p.repost_images);
  EXPECT_EQ(p.repost_images->size(), 1u);
  EXPECT_EQ(p.repost_username, "orig");
  EXPECT_TRUE(p.repost_timestamp);
  EXPECT_EQ(p.source_device, "iPhone");
  EXPECT_TRUE(p.has_repost_metadata());
}

TEST(ParseRecord, EmptyOptionalFieldsAreAbsent) {
  auto r = parse_record(
      R"({"Weibo_ID":"w","User_ID":"u","Content":"c","Timestamp":1,"Repost - Content":"","Repost - Imgs":[]})");
  ASSERT_TRUE(std::holds_alternative<PostRecord>(r));
  EXPECT_FALSE(std::get<PostRecord>(r).has_repost_metadata());
}

TEST(ParseRecord, Errors) {
  auto kind = [](std::string_view line) {
    auto r = parse_record(line);
    return std::holds_alternative<RecordError>(r) ? std::get<RecordError>(r).kind
                                                  : static_cast<RecordErrorKind>(-1);
  };
  EXPECT_EQ(kind("{not json"), RecordErrorKind::MalformedJson);
  EXPECT_EQ(kind("[1,2]"), RecordErrorKind::MalformedJson);
  EXPECT_EQ(kind(""), RecordErrorKind::MalformedJson);
  EXPECT_EQ(kind(R"({"Weibo_ID":"w","User_ID":"u","Content":"c","Timestamp":"not-a-date"})"),
            RecordErrorKind::BadTimestamp);
  EXPECT_EQ(kind(R"({"Weibo_ID":"w","User_ID":"u","Content":7,"Timestamp":1})"),
            RecordErrorKind::InvalidField);
  EXPECT_EQ(kind(R"({"Weibo_ID":"w","User_ID":"u","Timestamp":1})"),
            RecordErrorKind::MissingRequiredField);
}

TEST(ParseRecord, Aliases) {
  IngestOptions opts;
  opts.fields.add_alias(Field::Content, "text");
  auto r = parse_record(R"({"Weibo_ID":"w","User_ID":"u","text":"hi","Timestamp":1})", opts);
  ASSERT_TRUE(std::holds_alternative<PostRecord>(r));
  EXPECT_EQ(std::get<PostRecord>(r).content, "hi");
}

TEST(ParseRecord, SerializeRoundTrip) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    PostRecord p;
    p.weibo_id = "id" + std::to_string(rng());
    p.user_id = "u" + std::to_string(i);
    p.content = i % 2 ? "武汉\t加油 \"quote\"" : "line\nbreak";
    p.timestamp = std::chrono::sys_seconds{std::chrono::seconds{static_cast<long long>(rng() % 2'000'000'000)}};
    if (i % 3 == 0) p.repost_content = "原帖";
    if (i % 5 == 0) p.repost_images = std::vector<std::string>{"x.png", "y.png"};
    if (i % 7 == 0) p.repost_timestamp = p.timestamp - std::chrono::seconds{60};
    if (i % 4 == 0) p.repost_username = "someone";
    if (i % 6 == 0) p.source_device = "Android";
    auto back = parse_record(serialize_record(p));
    ASSERT_TRUE(std::holds_alternative<PostRecord>(back));
    EXPECT_EQ(std::get<PostRecord>(back), p);
  }
}

TEST(CorpusReader, CountsAndSidecar) {
  auto p = temp_file("three.ndjson",
                     "{\"Weibo_ID\":\"1\",\"User_ID\":\"u\",\"Content\":\"a\",\"Timestamp\":1}\n"
                     "garbage\n"
                     "{\"Weibo_ID\":\"2\",\"User_ID\":\"u\",\"Content\":\"b\",\"Timestamp\":2}\n");
  std::ostringstream sidecar;
  CorpusReader reader(p, {}, &sidecar);
  std::size_t records = 0, errors = 0;
  while (auto r = reader.next()) {
    std::holds_alternative<PostRecord>(*r) ? ++records : ++errors;
  }
  EXPECT_EQ(records, 2u);
  EXPECT_EQ(errors, 1u);
  EXPECT_EQ(reader.stats().total_lines, 3u);
  EXPECT_EQ(reader.stats().parsed, 2u);
  EXPECT_EQ(reader.stats().rejected, 1u);
  EXPECT_EQ(sidecar.str(), "2\tmalformed_json\n");
}

TEST(CorpusReader, EmptyFile) {
  auto p = temp_file("empty.ndjson", "");
  auto loaded = load_corpus(p);
  EXPECT_TRUE(loaded.records.empty());
  EXPECT_EQ(loaded.stats.total_lines, 0u);
  EXPECT_EQ(loaded.stats.parsed, 0u);
  EXPECT_EQ(loaded.stats.rejected, 0u);
}

TEST(CorpusReader, MissingFileThrows) {
  EXPECT_THROW(load_corpus("/nonexistent/sentiflow.ndjson"), IoError);
}

TEST(CorpusReader, LargeGeneratedFile) {
  auto dir = fs::temp_directory_path() / "sentiflow_ingest_test";
  fs::create_directories(dir);
  auto p = dir / "large.ndjson";
  const std::size_t n = 200'000;
  {
    std::ofstream out(p, std::ios::binary);
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 1000 == 999) {
        out << "{broken\n";
        continue;
      }
      out << "{\"Weibo_ID\":\"" << i << "\",\"User_ID\":\"u\",\"Content\":\"内容" << i
          << "\",\"Timestamp\":" << 1'570'000'000 + i << "}\n";
    }
  }
  CorpusReader reader(p);
  std::size_t ok = 0;
  while (auto r = reader.next()) ok += std::holds_alternative<PostRecord>(*r);
  EXPECT_EQ(ok, n - n / 1000);
  EXPECT_EQ(reader.stats().rejected, n / 1000);
  EXPECT_EQ(reader.stats().total_lines, n);
}

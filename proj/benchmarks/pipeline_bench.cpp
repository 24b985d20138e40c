#include <benchmark/benchmark.h>

#include <random>

#include "sentiflow/entropy.hpp"
#include "sentiflow/ingest.hpp"
#include "sentiflow/normalize.hpp"
#include "sentiflow/partition.hpp"

using namespace sentiflow;

namespace {

std::string han_post(std::mt19937_64& rng, int chars) {
  std::uniform_int_distribution<int> han(0x4E00, 0x9FA5), space(0, 9);
  std::string s;
  for (int i = 0; i < chars; ++i) {
    char32_t c = static_cast<char32_t>(han(rng));
    s += static_cast<char>(0xE0 | (c >> 12));
    s += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (c & 0x3F));
    if (space(rng) == 0) s += ' ';
  }
  return s;
}

std::vector<PostRecord> corpus(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<PostRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].weibo_id = std::to_string(i);
    out[i].user_id = "u";
    out[i].timestamp = std::chrono::sys_seconds{std::chrono::seconds{1'570'000'000 + static_cast<long long>(i)}};
    out[i].content = i % 4 == 3 ? out[i - 1].content + " " : han_post(rng, 40);
  }
  return out;
}

}  // namespace

static void BM_NormalizeContent(benchmark::State& state) {
  std::mt19937_64 rng(2);
  auto text = han_post(rng, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(normalize_content(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_NormalizeContent)->Arg(40)->Arg(140)->Arg(1000);

static void BM_Partition(benchmark::State& state) {
  auto records = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(partition(records));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Partition)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_CharEntropy(benchmark::State& state) {
  std::mt19937_64 rng(3);
  EntropySample s;
  for (int i = 0; i < state.range(0); ++i) s.posts.push_back(han_post(rng, 60));
  for (auto _ : state) benchmark::DoNotOptimize(char_entropy(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CharEntropy)->Arg(1000)->Arg(15'000)->Unit(benchmark::kMillisecond);

static void BM_ParseRecord(benchmark::State& state) {
  std::mt19937_64 rng(4);
  PostRecord p;
  p.weibo_id = "4471234567890123";
  p.user_id = "1234567890";
  p.content = han_post(rng, 80);
  p.timestamp = std::chrono::sys_seconds{std::chrono::seconds{1'579'776'000}};
  p.repost_content = han_post(rng, 40);
  auto line = serialize_record(p);
  for (auto _ : state) benchmark::DoNotOptimize(parse_record(line));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * line.size()));
}
BENCHMARK(BM_ParseRecord);

BENCHMARK_MAIN();

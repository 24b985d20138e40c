// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "mock_endpoint.hpp"
#include "oracles.hpp"
#include "sentiflow/classifier.hpp"
#include "sentiflow/entropy.hpp"
#include "sentiflow/evaluation.hpp"
#include "sentiflow/partition.hpp"
#include "sentiflow/timeline.hpp"

using namespace sentiflow;
using namespace std::chrono;
namespace fs = std::filesystem;
using S = SentimentLabel;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) notes << "first failure: " << what;
      ok = false;
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s << what << " got " << got << " want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, s.str());
  }
};

double seconds_since(steady_clock::time_point t) {
  return duration<double>(steady_clock::now() - t).count();
}

// 1 ---------------------------------------------------------------------------
Check metrics_golden() {
  Check c;
  auto t0 = steady_clock::now();
  auto truth = read_truth_csv(std::string(SENTIFLOW_TEST_DATA) + "/validation_truth.csv");
  auto pred = read_prediction_csv(std::string(SENTIFLOW_TEST_DATA) + "/validation_llama3.csv");
  auto cm = confusion_matrix(truth, pred).matrix;
  const ConfusionMatrix llama3_matrix({{{3, 3, 1, 0}, {1, 69, 1, 5}, {1, 8, 25, 1}, {2, 17, 3, 59}}});
  c.expect(cm == llama3_matrix, "fixture files rebuild the published confusion matrix");
  auto m = precision_recall_f1(llama3_matrix);
  const double want[4][3] = {{0.4286, 0.4286, 0.4286},
                             {0.7113, 0.9079, 0.7977},
                             {0.8333, 0.7143, 0.7692},
                             {0.9077, 0.7284, 0.8082}};
  for (auto l : kAllLabels) {
    const auto* k = m.find(l);
    const std::string name(to_string(l));
    c.near(k->precision, want[index_of(l)][0], 1e-4, name + " precision");
    c.near(k->recall, want[index_of(l)][1], 1e-4, name + " recall");
    c.near(k->f1, want[index_of(l)][2], 1e-4, name + " f1");
  }
  c.near(weighted_f1(llama3_matrix), 0.7839, 5e-4, "weighted f1");
  double elapsed = seconds_since(t0);
  c.expect(elapsed < 1.0, "runtime under 1 s");
  c.notes << (c.ok ? "" : "; ") << "weighted_f1=" << weighted_f1(llama3_matrix) << " in " << elapsed << " s";
  return c;
}

// 2 ---------------------------------------------------------------------------
Check entropy_golden() {
  Check c;
  auto t0 = steady_clock::now();
  auto r = entropy_table(
      {{S::Neutral, 9.2740}, {S::Positive, 9.3299}, {S::Sarcastic, 9.4084}, {S::Negative, 9.4567}});
  const S order[] = {S::Neutral, S::Positive, S::Sarcastic, S::Negative};
  const double dist[] = {0.0559, 0.0785, 0.0483};
  for (std::size_t i = 0; i < 4; ++i) {
    c.expect(r.rows[i].label == order[i], "rank order");
    if (i < 3) c.near(r.rows[i].distance.value_or(-1), dist[i], 1e-5, "adjacent distance");
  }
  c.expect(!r.rows[3].distance, "highest row has no distance");
  c.near(r.low_pair.entropy, 9.30195, 1e-5, "low pair entropy");
  c.near(r.high_pair.entropy, 9.43255, 1e-5, "high pair entropy");
  c.near(r.pair_distance, 0.1306, 1e-5, "pair distance");
  double elapsed = seconds_since(t0);
  c.expect(elapsed < 1.0, "runtime under 1 s");
  c.notes << (c.ok ? "" : "; ") << "pairs " << r.low_pair.entropy << "/" << r.high_pair.entropy
          << " distance " << r.pair_distance;
  return c;
}

// 3 ---------------------------------------------------------------------------
Check entropy_engine() {
  Check c;
  c.near(char_entropy("abab"), 1.0, 1e-12, "abab");
  for (int k : {2, 4, 16, 256}) {
    std::vector<char32_t> cps;
    for (int i = 0; i < k; ++i) cps.push_back(0x4E00 + i);
    c.near(char_entropy(oracle::encode_utf8(cps)), std::log2(k), 1e-12, "uniform k=" + std::to_string(k));
  }
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int> posts(1, 10), len(1, 80), alphabet(1, 300);
  double worst = 0;
  for (int corpus = 0; corpus < 100; ++corpus) {
    int a = alphabet(rng);
    std::uniform_int_distribution<char32_t> ch(0x4E00, 0x4E00 + a - 1);
    EntropySample s;
    for (int p = posts(rng); p > 0; --p) {
      std::vector<char32_t> cps;
      for (int k = len(rng); k > 0; --k) cps.push_back(corpus % 4 == 0 && k % 3 == 0 ? U' ' : ch(rng));
      s.posts.push_back(oracle::encode_utf8(cps));
    }
    double diff = std::abs(char_entropy(s) - oracle::entropy_bits(s.posts));
    worst = std::max(worst, diff);
    c.expect(diff <= 1e-12, "random corpus " + std::to_string(corpus));
  }
  c.notes << (c.ok ? "" : "; ") << "k in {2,4,16,256} exact, 100 corpora max diff " << worst;
  return c;
}

// 4 ---------------------------------------------------------------------------
Check dedup_suite() {
  Check c;
  auto corpus = oracle::synthetic_corpus(100'000, 20240601);
  PartitionOptions opts;
  opts.workers = std::max(1u, std::thread::hardware_concurrency());
  auto part = partition(corpus.records, opts);
  const auto& k = part.counts();
  c.expect(k == corpus.counts, "counts equal planted ground truth");
  c.expect(k.total() == 100'000, "counts sum to 100000");
  std::size_t wrong = 0;
  for (const auto& e : part.entries()) {
    const auto& t = corpus.truth.at(e.weibo_id);
    wrong += e.kind.tag != t.tag || e.kind.canonical_id != t.canonical;
  }
  c.expect(wrong == 0, std::to_string(wrong) + " posts disagree with ground truth");

  // uniform subsamples rarely keep a duplicate together with its canonical
  // post, so most rounds draw whole duplicate groups instead
  std::map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::size_t> reposts;
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const auto& t = corpus.truth.at(corpus.records[i].weibo_id);
    if (t.tag == PostKindTag::Repost) {
      reposts.push_back(i);
    } else {
      groups[t.tag == PostKindTag::Duplicate ? t.canonical : corpus.records[i].weibo_id].push_back(i);
    }
  }
  std::vector<const std::vector<std::size_t>*> group_list;
  for (const auto& [id, members] : groups) group_list.push_back(&members);

  std::mt19937_64 rng(8);
  std::size_t sub_duplicates = 0;
  for (int round = 0; round < 10; ++round) {
    std::vector<PostRecord> sub;
    if (round < 2) {
      std::sample(corpus.records.begin(), corpus.records.end(), std::back_inserter(sub), 1000, rng);
    } else {
      std::shuffle(group_list.begin(), group_list.end(), rng);
      for (const auto* g : group_list) {
        if (sub.size() + g->size() > 800) continue;
        for (auto i : *g) sub.push_back(corpus.records[i]);
      }
      std::shuffle(reposts.begin(), reposts.end(), rng);
      for (std::size_t i = 0; sub.size() < 1000; ++i) sub.push_back(corpus.records[reposts[i]]);
    }
    auto want = oracle::dedup_quadratic(sub);
    auto got = partition(sub);
    sub_duplicates += got.counts().duplicate;
    std::size_t mismatch = 0;
    for (const auto& e : got.entries()) {
      const auto& w = want.at(e.weibo_id);
      mismatch += e.kind.tag != w.tag || e.kind.canonical_id != w.canonical;
    }
    c.expect(sub.size() == 1000 && mismatch == 0, "1000-post subsample disagrees with O(n^2) oracle");
  }

  auto big = oracle::synthetic_corpus(1'000'000, 77);
  auto t0 = steady_clock::now();
  auto big_part = partition(big.records, opts);
  double elapsed = seconds_since(t0);
  c.expect(big_part.counts() == big.counts, "1M counts equal ground truth");
  c.expect(elapsed < 60.0, "1M dedup under 60 s");
  c.notes << (c.ok ? "" : "; ") << "100k: " << k.distinct << "/" << k.duplicate << "/" << k.repost
          << ", 10 oracle subsamples with " << sub_duplicates << " duplicates, 1M in " << elapsed << " s";
  return c;
}

// 5 ---------------------------------------------------------------------------
struct DeskFixture {
  std::vector<PostRecord> records;
  std::map<std::string, std::string> script;  // classification text -> reply
};

DeskFixture desk_fixture() {
  DeskFixture f;
  std::mt19937_64 rng(199);
  const char* replies[4][3] = {{"Sarcastic", "“sarcastic.”", "SARCASTIC"},
                               {"Neutral", "neutral", "Neutral."},
                               {"Negative", "negative!", "\"Negative\""},
                               {"Positive", "positive", "Positive。"}};
  std::uniform_int_distribution<int> label(0, 3), form(0, 2), han(0x4E00, 0x9FA5), len(3, 30);
  auto text = [&](int serial) {
    std::vector<char32_t> cps;
    for (int i = len(rng); i > 0; --i) cps.push_back(static_cast<char32_t>(han(rng)));
    for (char ch : std::to_string(serial)) cps.push_back(static_cast<char32_t>(ch));
    return oracle::encode_utf8(cps);
  };
  std::vector<std::size_t> distinct;
  for (int i = 0; i < 199; ++i) {
    PostRecord p;
    p.weibo_id = "d" + std::to_string(1000 + i);
    p.user_id = "u" + std::to_string(i % 17);
    p.timestamp = sys_seconds{seconds{1'577'836'800 + i * 3600}};
    if (i % 8 == 7 && !distinct.empty()) {
      p.content = f.records[distinct[static_cast<std::size_t>(han(rng)) % distinct.size()]].content;
      p.content.insert(0, i % 16 == 7 ? "　" : " \t");
    } else if (i % 9 == 4) {
      p.content = text(i) + (i % 2 ? "//" : "");
      if (i % 2 == 0) p.repost_content = text(i + 500);
    } else {
      p.content = text(i);
      distinct.push_back(f.records.size());
    }
    f.records.push_back(p);
    if (i % 8 != 7 || distinct.empty()) {
      f.script[classification_text(p)] = replies[label(rng)][form(rng)];
    }
  }
  return f;
}

Check desk_run() {
  Check c;
  auto f = desk_fixture();
  auto part = partition(f.records);
  c.expect(part.size() == 199, "fixture has 199 posts");
  c.expect(part.counts().duplicate > 0 && part.counts().repost > 0, "fixture has duplicates and reposts");

  ClassifyOptions opts;
  opts.clock = [] { return sys_seconds{seconds{1'700'000'000}}; };
  opts.batch_size = 64;
  mock::MockEndpoint mock(mock::scripted_responder(f.script, "unscripted"), milliseconds(5));
  EndpointConfig cfg;
  cfg.base_url = mock.base_url();
  cfg.max_in_flight = 8;
  cfg.backoff_initial = milliseconds(1);
  InferenceClient client(cfg);

  auto dir = fs::temp_directory_path() / "sentiflow_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto reference_path = dir / "reference.ndjson";
  std::vector<ClassificationRecord> reference;
  {
    auto store = ResultStore::open(reference_path);
    auto summary = classify_corpus(part, f.records, client, store, opts);
    c.expect(summary.model_calls == part.counts().distinct + part.counts().repost,
             "one call per distinct post and repost");
    reference = store.effective_records();
  }
  c.expect(reference.size() == 199, "every post has a record");
  std::size_t label_mismatch = 0, inherit_missing = 0;
  for (const auto& e : part.entries()) {
    auto r = std::find_if(reference.begin(), reference.end(),
                          [&](const auto& x) { return x.weibo_id == e.weibo_id; });
    if (r == reference.end()) continue;
    if (e.kind.tag == PostKindTag::Duplicate) {
      inherit_missing += r->inherited_from != e.kind.canonical_id;
      const auto& canon = f.records[part.find(e.kind.canonical_id)->record_index];
      label_mismatch += r->label != parse_label(f.script.at(classification_text(canon)));
    } else {
      inherit_missing += r->inherited_from.has_value();
      label_mismatch += r->label != parse_label(f.script.at(classification_text(f.records[e.record_index])));
    }
  }
  c.expect(label_mismatch == 0, std::to_string(label_mismatch) + " labels differ from the script");
  c.expect(inherit_missing == 0, "inherited_from set exactly on duplicates");

  // crash at several points: cut the file mid-line, reopen, resume
  const auto full = fs::file_size(reference_path);
  std::size_t resumed_calls = 0;
  for (double cut : {0.13, 0.5, 0.87}) {
    auto crashed = dir / ("crash_" + std::to_string(int(cut * 100)) + ".ndjson");
    fs::copy_file(reference_path, crashed);
    fs::resize_file(crashed, static_cast<std::uintmax_t>(double(full) * cut));
    auto before = mock.requests();
    auto store = ResultStore::open(crashed);
    classify_corpus(part, f.records, client, store, opts);
    resumed_calls += mock.requests() - before;
    c.expect(store.effective_records() == reference, "resume converges at cut " + std::to_string(cut));
    c.expect(ResultStore::open(crashed).effective_records() == reference, "reloaded store converges");
  }
  {
    auto before = mock.requests();
    auto store = ResultStore::open(reference_path);
    classify_corpus(part, f.records, client, store, opts);
    c.expect(mock.requests() == before, "rerun on a complete store makes no calls");
  }
  c.expect(mock.peak_in_flight() <= 8, "in-flight bound 8");
  c.notes << (c.ok ? "" : "; ") << "199 posts (" << part.counts().distinct << "/"
          << part.counts().duplicate << "/" << part.counts().repost << "), " << mock.requests()
          << " requests, " << resumed_calls << " after crashes, peak in-flight "
          << mock.peak_in_flight();
  return c;
}

// 6 ---------------------------------------------------------------------------
Check timeline_properties() {
  Check c;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<long long> secs(1'564'617'600, 1'588'291'199);
  std::uniform_int_distribution<int> label(0, 3), kind(0, 2), size(1, 3000), extra(1, 500);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LabeledPost> posts;
    for (int i = size(rng); i > 0; --i) {
      posts.push_back({sys_seconds{seconds{secs(rng)}}, kAllLabels[label(rng)],
                       static_cast<PostKindTag>(kind(rng))});
    }
    DateRange range;
    if (trial % 2) range = {Date{days{18'100 + trial}}, Date{days{18'300 + trial}}};
    std::uint64_t filtered = 0;
    Date lo = Date::max(), hi = Date::min();
    for (const auto& p : posts) {
      auto d = floor<days>(p.timestamp);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    Date from = range.from.value_or(lo), to = range.to.value_or(hi);
    for (const auto& p : posts) {
      auto d = floor<days>(p.timestamp);
      filtered += d >= from && d <= to;
    }
    auto series = bucket_weekly(posts, range);
    std::uint64_t counted = 0;
    for (const auto& b : series.buckets) counted += b.total();
    c.expect(counted == filtered, "bucket totals equal filtered post count");
    for (const auto& fr : percentage_series(series)) {
      if (!fr.fractions) continue;
      double sum = 0;
      for (double x : *fr.fractions) sum += x;
      worst = std::max(worst, std::abs(sum - 1.0));
      c.expect(std::abs(sum - 1.0) <= 1e-9, "fractions sum to 1");
    }

    bool has_distinct = std::any_of(posts.begin(), posts.end(),
                                    [](const auto& p) { return in_scope(p, ShareScope::Distinct); });
    if (!has_distinct) continue;
    auto before = sentiment_shares(posts, ShareScope::Distinct);
    auto injected = posts;
    for (int i = extra(rng); i > 0; --i) {
      injected.push_back({sys_seconds{seconds{secs(rng)}}, kAllLabels[label(rng)], PostKindTag::Duplicate});
    }
    std::shuffle(injected.begin(), injected.end(), rng);
    auto after = sentiment_shares(injected, ShareScope::Distinct);
    c.expect(before.fractions == after.fractions && before.total == after.total,
             "distinct shares invariant under duplicate injection");
  }
  c.notes << (c.ok ? "" : "; ") << "100 random fixtures, max |sum-1| " << worst;
  return c;
}

// 7 ---------------------------------------------------------------------------
Check reproduction_documented() {
  Check c;
  std::ifstream in(SENTIFLOW_README);
  c.expect(static_cast<bool>(in), "README.md present");
  std::string readme{std::istreambuf_iterator<char>(in), {}};
  auto section = readme.find("## Full-dataset reproduction");
  c.expect(section != std::string::npos, "README has a full-dataset reproduction section");
  if (section != std::string::npos) {
    auto body = readme.substr(section);
    for (const char* cmd : {"sentiflow clean", "sentiflow classify", "sentiflow evaluate",
                            "sentiflow entropy", "sentiflow timeline", "sentiflow report"}) {
      c.expect(body.find(cmd) != std::string::npos, std::string("documents `") + cmd + "`");
    }
    for (const char* figure : {"2,226,667", "877,031", "945,709"}) {
      c.expect(body.find(figure) != std::string::npos, std::string("states expected count ") + figure);
    }
  }
  c.notes << (c.ok ? "" : "; ")
          << "documentation check only; the published corpus counts, shares and absolute "
             "entropies need the full dataset and a live model endpoint";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"metrics golden (confusion matrix -> P/R/F1, weighted F1)", metrics_golden},
      {"entropy table arithmetic golden", entropy_golden},
      {"entropy engine vs uniform alphabets and frequency oracle", entropy_engine},
      {"dedup property suite (100k ground truth, O(n^2) oracle, 1M timing)", dedup_suite},
      {"desk-scale end-to-end run against scripted mock", desk_run},
      {"timeline properties on random fixtures", timeline_properties},
      {"full-dataset reproduction documented", reproduction_documented},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    Check result;
    try {
      result = fn();
    } catch (const std::exception& e) {
      result.ok = false;
      result.notes << "exception: " << e.what();
    }
    failed += !result.ok;
    std::cout << (result.ok ? "PASS" : "FAIL") << "  criterion " << n << ": " << name << "  ["
              << result.notes.str() << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}

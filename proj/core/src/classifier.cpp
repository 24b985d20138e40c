#include "sentiflow/classifier.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>

#include "sentiflow/csv.hpp"
#include "sentiflow/normalize.hpp"

namespace sentiflow {
namespace {

using Clock = std::chrono::steady_clock;

struct Job {
  const PartitionEntry* entry;
  std::string text;
  int previous_attempts = 0;
};

struct JobOutcome {
  ClassificationRecord record;
  bool replied = false;  // the model answered (parseable or not)
};

// Submits one batch, re-querying unparseable replies `requery` more times.
std::vector<JobOutcome> run_batch(std::span<const Job> jobs, const InferenceClient& client,
                                  const ClassifyOptions& options, int requery,
                                  std::size_t& model_calls) {
  std::vector<JobOutcome> out(jobs.size());
  std::vector<PromptBundle> bundles;
  std::vector<std::size_t> pending;

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& rec = out[i].record;
    rec.weibo_id = jobs[i].entry->weibo_id;
    rec.attempts = jobs[i].previous_attempts;
    rec.model_name = client.config().model_name;
    if (trim_unicode(jobs[i].text).empty()) {
      rec.error = "empty post";
      continue;
    }
    pending.push_back(i);
  }

  for (int round = 0; round <= requery && !pending.empty(); ++round) {
    bundles.clear();
    for (std::size_t i : pending) bundles.push_back(build_prompt(jobs[i].text, options.examples));
    auto results = client.complete_many(bundles);
    model_calls += results.size();

    std::vector<std::size_t> retry;
    for (std::size_t k = 0; k < results.size(); ++k) {
      auto& o = out[pending[k]];
      ++o.record.attempts;
      if (const auto* ok = std::get_if<CompletionResult>(&results[k].outcome)) {
        o.replied = true;
        o.record.raw_output = ok->text;
        o.record.error.reset();
        if (!ok->endpoint_model.empty()) o.record.model_name = ok->endpoint_model;
        o.record.label = parse_label(ok->text);
        if (!o.record.label) retry.push_back(pending[k]);
      } else {
        const auto& fail = std::get<InferenceFailure>(results[k].outcome);
        o.replied = false;
        o.record.raw_output.clear();
        o.record.label.reset();
        o.record.error = std::string(to_string(fail.kind)) + ": " + fail.message;
      }
    }
    pending = std::move(retry);
  }

  const Instant now = options.clock();
  for (auto& o : out) o.record.classified_at = now;
  return out;
}

// Appends inherited records for duplicates whose stored state disagrees with
// their canonical post. Returns the number appended.
std::size_t sync_duplicates(const CorpusPartition& partition, ResultStore& store,
                            const ClassifyOptions& options) {
  std::vector<ClassificationRecord> pending;
  const Instant now = options.clock();
  for (const auto& e : partition.entries()) {
    if (e.kind.tag != PostKindTag::Duplicate) continue;
    const auto* canonical = store.find(e.kind.canonical_id);
    if (!canonical) continue;
    const auto* current = store.find(e.weibo_id);
    if (current && current->inherited_from == e.kind.canonical_id &&
        current->label == canonical->label) {
      continue;
    }
    ClassificationRecord r;
    r.weibo_id = e.weibo_id;
    r.label = canonical->label;
    r.inherited_from = e.kind.canonical_id;
    r.classified_at = now;
    r.model_name = canonical->model_name;
    pending.push_back(std::move(r));
  }
  store.append(pending);
  return pending.size();
}

}  // namespace

std::string classification_text(const PostRecord& record, const RepostRules& rules) {
  if (rules.metadata && record.repost_content) {
    return std::string(trim_unicode(record.content)) + "//" + *record.repost_content;
  }
  return record.content;
}

RunSummary classify_corpus(const CorpusPartition& partition, std::span<const PostRecord> records,
                           const InferenceClient& client, ResultStore& store,
                           const ClassifyOptions& options) {
  const auto started = Clock::now();
  RunSummary summary;
  summary.posts_total = partition.size();

  std::vector<Job> jobs;
  for (const auto& e : partition.entries()) {
    if (e.kind.tag == PostKindTag::Duplicate) continue;
    if (store.find(e.weibo_id)) {
      ++summary.resumed;
      continue;
    }
    jobs.push_back({&e, classification_text(records[e.record_index], options.repost_rules), 0});
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<ClassificationRecord> batch_records;
  for (std::size_t begin = 0; begin < jobs.size(); begin += batch) {
    auto span = std::span(jobs).subspan(begin, std::min(batch, jobs.size() - begin));
    auto outcomes = run_batch(span, client, options, /*requery=*/1, summary.model_calls);
    batch_records.clear();
    for (auto& o : outcomes) {
      if (o.record.error) {
        ++summary.errors;
      } else if (!o.record.label) {
        ++summary.unparsed;
      }
      batch_records.push_back(std::move(o.record));
    }
    store.append(batch_records);
  }

  summary.inherited = sync_duplicates(partition, store, options);
  summary.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  return summary;
}

RequerySummary requery_unparsed(ResultStore& store, const CorpusPartition& partition,
                                std::span<const PostRecord> records, const InferenceClient& client,
                                std::size_t max_rounds, const ClassifyOptions& options) {
  RequerySummary summary;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    std::vector<Job> jobs;
    for (const auto& e : partition.entries()) {
      const auto* r = store.find(e.weibo_id);
      if (!r || r->label || r->inherited_from) continue;
      jobs.push_back({&e, classification_text(records[e.record_index], options.repost_rules),
                      r->attempts});
    }
    if (jobs.empty()) break;
    ++summary.rounds;

    const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
    std::vector<ClassificationRecord> batch_records;
    for (std::size_t begin = 0; begin < jobs.size(); begin += batch) {
      auto span = std::span(jobs).subspan(begin, std::min(batch, jobs.size() - begin));
      auto outcomes = run_batch(span, client, options, /*requery=*/0, summary.model_calls);
      batch_records.clear();
      for (auto& o : outcomes) {
        if (o.record.label) ++summary.resolved;
        batch_records.push_back(std::move(o.record));
      }
      store.append(batch_records);
    }
    summary.propagated += sync_duplicates(partition, store, options);
  }
  for (const auto& e : partition.entries()) {
    const auto* r = store.find(e.weibo_id);
    if (r && !r->label && !r->inherited_from) ++summary.still_unparsed;
  }
  return summary;
}

void write_run_summary_csv(std::ostream& out, const RunSummary& s) {
  csv::write_row(out, {"posts_total", "model_calls", "inherited", "unparsed", "errors", "wall_time"});
  csv::write_row(out, {std::to_string(s.posts_total), std::to_string(s.model_calls),
                       std::to_string(s.inherited), std::to_string(s.unparsed),
                       std::to_string(s.errors),
                       csv::format_fixed(static_cast<double>(s.wall_time.count()) / 1000.0, 3)});
}

}  // namespace sentiflow

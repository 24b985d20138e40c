#include "cli.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sentiflow/classifier.hpp"
#include "sentiflow/config.hpp"
#include "sentiflow/csv.hpp"
#include "sentiflow/entropy.hpp"
#include "sentiflow/evaluation.hpp"
#include "sentiflow/ingest.hpp"
#include "sentiflow/partition.hpp"
#include "sentiflow/result_store.hpp"
#include "sentiflow/timeline.hpp"

namespace sentiflow::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Flags {
  std::string config;
  std::string input;
  std::string store;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string from;
  std::string to;
  std::string resolution;
  std::string scope;
  // classify
  std::string endpoint;
  std::string model;
  std::optional<std::size_t> requery;
  // evaluate
  std::string truth;
  std::vector<std::string> predictions;
  std::vector<std::string> references;
};

class InputError : public Error {
 public:
  using Error::Error;
};

NamedPath parse_named(const std::string& arg, const std::string& flag) {
  auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw ConfigError(flag + " expects NAME=PATH, got '" + arg + "'");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

PipelineConfig resolve_config(const Flags& f) {
  PipelineConfig cfg = f.config.empty() ? PipelineConfig{} : load_config(f.config);
  if (!f.input.empty()) cfg.input = f.input;
  if (!f.store.empty()) cfg.store = f.store;
  if (!f.out.empty()) cfg.out = f.out;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.from.empty()) {
    cfg.date_range.from = parse_date(f.from);
    if (!cfg.date_range.from) throw ConfigError("--from expects YYYY-MM-DD");
  }
  if (!f.to.empty()) {
    cfg.date_range.to = parse_date(f.to);
    if (!cfg.date_range.to) throw ConfigError("--to expects YYYY-MM-DD");
  }
  if (!f.resolution.empty()) {
    auto r = resolution_from_name(f.resolution);
    if (!r) throw ConfigError("--resolution expects week or day");
    cfg.resolution = *r;
  }
  if (!f.scope.empty()) {
    auto s = share_scope_from_name(f.scope);
    if (!s) throw ConfigError("--scope expects all or distinct");
    cfg.scope = *s;
  }
  if (!f.endpoint.empty()) cfg.endpoint.base_url = f.endpoint;
  if (!f.model.empty()) cfg.endpoint.model_name = f.model;
  if (f.requery) cfg.requery_rounds = *f.requery;
  if (!f.truth.empty()) cfg.evaluate.truth = f.truth;
  if (!f.predictions.empty()) {
    cfg.evaluate.predictions.clear();
    for (const auto& p : f.predictions) cfg.evaluate.predictions.push_back(parse_named(p, "--pred"));
  }
  if (!f.references.empty()) {
    cfg.evaluate.reference_metrics.clear();
    for (const auto& p : f.references) {
      cfg.evaluate.reference_metrics.push_back(parse_named(p, "--reference"));
    }
  }
  cfg.endpoint.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

const fs::path& require(const std::optional<fs::path>& p, const char* what) {
  if (!p) throw ConfigError(std::string("missing required setting: ") + what);
  return *p;
}

std::string slug(const std::string& name) {
  std::string s;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      s.push_back(static_cast<char>(std::tolower(c)));
    } else if (!s.empty() && s.back() != '_') {
      s.push_back('_');
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s.empty() ? "model" : s;
}

struct Corpus {
  LoadedCorpus loaded;
  CorpusPartition partition;
};

Corpus clean_stage(const PipelineConfig& cfg, std::ostream& out, json& report) {
  const auto& input = require(cfg.input, "input");
  fs::create_directories(cfg.out);
  Corpus c;
  c.loaded = load_corpus(input, cfg.ingest, cfg.out / "ingest_errors.tsv");
  PartitionOptions popts;
  popts.repost_rules = cfg.repost_rules;
  popts.workers = cfg.workers;
  c.partition = partition(c.loaded.records, popts);

  const auto& st = c.loaded.stats;
  write_file(cfg.out / "ingest_stats.csv", [&](std::ostream& os) {
    csv::write_row(os, {"metric", "value"});
    csv::write_row(os, {"total_lines", std::to_string(st.total_lines)});
    csv::write_row(os, {"parsed", std::to_string(st.parsed)});
    csv::write_row(os, {"rejected", std::to_string(st.rejected)});
    for (const auto& [reason, n] : st.rejection_reasons) {
      csv::write_row(os, {"reason:" + reason, std::to_string(n)});
    }
  });
  write_file(cfg.out / "partition_summary.csv",
             [&](std::ostream& os) { write_partition_summary_csv(os, c.partition); });
  write_file(cfg.out / "post_kinds.ndjson",
             [&](std::ostream& os) { write_assignments_ndjson(os, c.partition); });

  const auto& k = c.partition.counts();
  out << "clean: lines=" << st.total_lines << " parsed=" << st.parsed << " rejected=" << st.rejected
      << " distinct=" << k.distinct << " duplicate=" << k.duplicate << " repost=" << k.repost
      << '\n';
  report["ingest"] = {{"total_lines", st.total_lines},
                      {"parsed", st.parsed},
                      {"rejected", st.rejected},
                      {"rejection_reasons", st.rejection_reasons}};
  report["partition"] = {{"distinct", k.distinct}, {"duplicate", k.duplicate}, {"repost", k.repost}};
  return c;
}

ResultStore open_store(const PipelineConfig& cfg, bool must_exist) {
  const auto& path = require(cfg.store, "store");
  if (must_exist && !fs::exists(path)) throw IoError("result store not found: " + path.string());
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  return ResultStore::open(path);
}

void write_predictions(const fs::path& path, const Corpus& c, const ResultStore& store) {
  write_file(path, [&](std::ostream& os) {
    csv::write_row(os, {"id", "label"});
    for (const auto& e : c.partition.entries()) {
      if (const auto* r = store.find(e.weibo_id)) {
        csv::write_row(os, {e.weibo_id, std::string(to_string(r->label))});
      }
    }
  });
}

void classify_stage(const PipelineConfig& cfg, const Corpus& c, std::ostream& out, json& report) {
  auto store = open_store(cfg, false);
  ClassifyOptions opts;
  if (cfg.examples_file) opts.examples = load_examples(*cfg.examples_file);
  opts.repost_rules = cfg.repost_rules;
  opts.batch_size = cfg.batch_size;
  InferenceClient client(cfg.endpoint);

  auto summary = classify_corpus(c.partition, c.loaded.records, client, store, opts);
  RequerySummary requery;
  if (cfg.requery_rounds > 0) {
    requery = requery_unparsed(store, c.partition, c.loaded.records, client, cfg.requery_rounds, opts);
  }
  write_file(cfg.out / "run_summary.csv", [&](std::ostream& os) { write_run_summary_csv(os, summary); });
  write_predictions(cfg.out / "predictions.csv", c, store);
  out << "classify: posts=" << summary.posts_total << " model_calls=" << summary.model_calls
      << " inherited=" << summary.inherited << " unparsed=" << summary.unparsed
      << " errors=" << summary.errors << " resumed=" << summary.resumed;
  if (cfg.requery_rounds > 0) {
    out << " requery_calls=" << requery.model_calls << " resolved=" << requery.resolved
        << " still_unparsed=" << requery.still_unparsed;
  }
  out << '\n';
  report["classify"] = {{"posts_total", summary.posts_total}, {"model_calls", summary.model_calls},
                        {"inherited", summary.inherited},     {"unparsed", summary.unparsed},
                        {"errors", summary.errors},           {"resumed", summary.resumed}};
}

// Effective label per post; posts without a usable label are counted and skipped.
std::vector<LabeledPost> labeled_posts(const Corpus& c, const ResultStore& store,
                                       std::vector<std::size_t>* record_indices,
                                       std::size_t& unlabeled) {
  std::vector<LabeledPost> posts;
  unlabeled = 0;
  for (const auto& e : c.partition.entries()) {
    const auto* r = store.find(e.weibo_id);
    if (!r && e.kind.tag == PostKindTag::Duplicate) r = store.find(e.kind.canonical_id);
    if (!r || !r->label) {
      ++unlabeled;
      continue;
    }
    posts.push_back({c.loaded.records[e.record_index].timestamp, *r->label, e.kind.tag});
    if (record_indices) record_indices->push_back(e.record_index);
  }
  return posts;
}

void entropy_stage(const PipelineConfig& cfg, const Corpus& c, const ResultStore& store,
                   std::ostream& out, json& report) {
  std::vector<std::size_t> idx;
  std::size_t unlabeled = 0;
  auto posts = labeled_posts(c, store, &idx, unlabeled);
  std::map<SentimentLabel, std::vector<std::string>> texts;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    const auto kind = posts[i].kind;
    if (kind == PostKindTag::Duplicate) continue;
    if (kind == PostKindTag::Repost && !cfg.entropy_include_reposts) continue;
    texts[posts[i].label].push_back(c.loaded.records[idx[i]].content);
  }

  std::map<SentimentLabel, double> entropies;
  std::vector<EntropySample> samples;
  for (auto label : kAllLabels) {
    auto sample = sample_posts(label, texts[label], cfg.entropy_sample_size, cfg.seed);
    entropies[label] = char_entropy(sample, cfg.entropy);
    samples.push_back(std::move(sample));
  }
  auto table = entropy_table(entropies);
  write_file(cfg.out / "entropy.csv", [&](std::ostream& os) { write_entropy_csv(os, table); });
  write_file(cfg.out / "entropy_samples.csv", [&](std::ostream& os) {
    csv::write_row(os, {"type", "class_size", "requested_n", "actual_n", "seed", "entropy"});
    for (const auto& s : samples) {
      csv::write_row(os, {std::string(to_string(s.label)), std::to_string(texts[s.label].size()),
                          std::to_string(s.requested_n), std::to_string(s.actual_n),
                          std::to_string(s.seed), csv::format_fixed(entropies[s.label], 6)});
    }
  });
  out << "entropy:";
  json j = json::object();
  for (const auto& row : table.rows) {
    out << ' ' << to_string(row.label) << '=' << csv::format_fixed(row.entropy, 4);
    j[std::string(to_string(row.label))] = row.entropy;
  }
  out << " pair_distance=" << csv::format_fixed(table.pair_distance, 4) << '\n';
  report["entropy"] = {{"bits_per_char", j}, {"pair_distance", table.pair_distance}};
}

void timeline_stage(const PipelineConfig& cfg, const Corpus& c, const ResultStore& store,
                    std::ostream& out, json& report) {
  std::size_t unlabeled = 0;
  auto posts = labeled_posts(c, store, nullptr, unlabeled);
  std::vector<LabeledPost> scoped;
  for (const auto& p : posts) {
    if (in_scope(p, cfg.scope, cfg.reposts_in_distinct)) scoped.push_back(p);
  }
  auto series = bucket_weekly(scoped, cfg.date_range, cfg.resolution);
  const std::string prefix = cfg.resolution == Resolution::Week ? "weekly" : "daily";
  write_file(cfg.out / (prefix + "_counts.csv"), [&](std::ostream& os) { write_counts_csv(os, series); });
  write_file(cfg.out / (prefix + "_fractions.csv"),
             [&](std::ostream& os) { write_fractions_csv(os, series); });

  std::vector<ShareBreakdown> shares = {
      sentiment_shares(posts, ShareScope::All, cfg.reposts_in_distinct),
      sentiment_shares(posts, ShareScope::Distinct, cfg.reposts_in_distinct)};
  write_file(cfg.out / "shares.csv", [&](std::ostream& os) { write_shares_csv(os, shares); });

  std::uint64_t counted = 0;
  for (const auto& b : series.buckets) counted += b.total();
  out << "timeline: buckets=" << series.buckets.size() << " posts=" << counted
      << " unlabeled=" << unlabeled;
  json shares_json = json::object();
  for (const auto& s : shares) {
    const double calm = s.fractions[index_of(SentimentLabel::Neutral)] +
                        s.fractions[index_of(SentimentLabel::Positive)];
    out << ' ' << to_string(s.scope) << "_neutral_positive=" << csv::format_fixed(calm, 4);
    json fr = json::object();
    for (auto l : kAllLabels) fr[std::string(to_string(l))] = s.fractions[index_of(l)];
    shares_json[std::string(to_string(s.scope))] = fr;
  }
  out << '\n';
  report["timeline"] = {{"buckets", series.buckets.size()},
                        {"posts_in_range", counted},
                        {"unlabeled", unlabeled},
                        {"shares", shares_json}};
}

void evaluate_stage(const PipelineConfig& cfg, std::ostream& out, json& report) {
  const auto& ev = cfg.evaluate;
  if (ev.predictions.empty()) throw ConfigError("missing required setting: evaluate.predictions");
  const auto truth = read_truth_csv(require(ev.truth, "evaluate.truth"));
  fs::create_directories(cfg.out);

  std::vector<NamedReport> reports;
  json j = json::array();
  for (const auto& p : ev.predictions) {
    auto predicted = read_prediction_csv(p.path);
    auto result = confusion_matrix(truth, predicted);
    auto metrics = precision_recall_f1(result.matrix);
    const bool single = ev.predictions.size() == 1;
    const std::string suffix = single ? "" : "_" + slug(p.name);
    write_file(cfg.out / ("confusion_matrix" + suffix + ".csv"),
               [&](std::ostream& os) { write_confusion_csv(os, result.matrix); });
    write_file(cfg.out / ("metrics" + suffix + ".csv"),
               [&](std::ostream& os) { write_metrics_csv(os, metrics); });
    out << "evaluate: model=\"" << p.name << "\" n=" << result.matrix.total()
        << " excluded_unparsed=" << result.excluded_unparsed
        << " weighted_f1=" << csv::format_fixed(metrics.weighted_f1, 6) << '\n';
    j.push_back({{"name", p.name},
                 {"evaluated", result.matrix.total()},
                 {"excluded_unparsed", result.excluded_unparsed},
                 {"weighted_f1", metrics.weighted_f1}});
    reports.push_back({p.name, std::move(metrics)});
  }
  for (const auto& r : ev.reference_metrics) reports.push_back({r.name, read_metrics_csv(r.path)});

  if (reports.size() >= 2) {
    auto table = compare_models(reports);
    write_file(cfg.out / "comparison.csv", [&](std::ostream& os) { write_comparison_csv(os, table); });
    write_file(cfg.out / "comparison.txt", [&](std::ostream& os) { write_comparison_text(os, table); });
  }
  report["evaluate"] = j;
}

std::string quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q.push_back('\\');
    if (c == '\n' || c == '\r') {
      q.push_back(' ');
      continue;
    }
    q.push_back(c);
  }
  return q + '"';
}

int fail(std::ostream& err, const char* kind, const std::string& message, int code) {
  err << "error: kind=" << kind << " message=" << quote(message) << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sentiment analytics pipeline for social-media post corpora", "sentiflow"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config file");
  app.add_option("--input", f.input, "Newline-delimited JSON posts");
  app.add_option("--store", f.store, "Classification result store (NDJSON)");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--seed", f.seed, "Sampling seed");
  app.add_option("--from", f.from, "First date, YYYY-MM-DD (inclusive)");
  app.add_option("--to", f.to, "Last date, YYYY-MM-DD (inclusive)");
  app.add_option("--resolution", f.resolution, "Timeline bucket: week or day");
  app.add_option("--scope", f.scope, "Timeline scope: all or distinct");

  auto* clean = app.add_subcommand("clean", "Parse and partition the corpus");
  auto* classify = app.add_subcommand("classify", "Label posts through the inference endpoint");
  classify->add_option("--endpoint", f.endpoint, "Base URL, e.g. http://127.0.0.1:8000/v1");
  classify->add_option("--model", f.model, "Model name sent with each request");
  classify->add_option("--requery", f.requery, "Extra rounds for unparsed replies");
  auto* evaluate = app.add_subcommand("evaluate", "Confusion matrices and P/R/F1 tables");
  for (auto* sub : {evaluate}) {
    sub->add_option("--truth", f.truth, "Ground-truth CSV id,label");
    sub->add_option("--pred", f.predictions, "NAME=PATH prediction CSV (repeatable)");
    sub->add_option("--reference", f.references, "NAME=PATH published metrics CSV (repeatable)");
  }
  auto* entropy = app.add_subcommand("entropy", "Per-sentiment character entropy table");
  auto* timeline = app.add_subcommand("timeline", "Weekly series and sentiment shares");
  auto* report_cmd = app.add_subcommand("report", "clean + entropy + timeline + evaluate");
  for (auto* sub : {clean, classify, evaluate, entropy, timeline, report_cmd}) sub->fallthrough();

  std::vector<const char*> argv = {"sentiflow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return fail(err, "usage", e.what(), kUsage);
  }

  try {
    const PipelineConfig cfg = resolve_config(f);
    json report = json::object();
    if (clean->parsed()) {
      clean_stage(cfg, out, report);
    } else if (classify->parsed()) {
      auto corpus = clean_stage(cfg, out, report);
      classify_stage(cfg, corpus, out, report);
    } else if (evaluate->parsed()) {
      evaluate_stage(cfg, out, report);
    } else if (entropy->parsed()) {
      auto corpus = clean_stage(cfg, out, report);
      auto store = open_store(cfg, true);
      entropy_stage(cfg, corpus, store, out, report);
    } else if (timeline->parsed()) {
      auto corpus = clean_stage(cfg, out, report);
      auto store = open_store(cfg, true);
      timeline_stage(cfg, corpus, store, out, report);
    } else if (report_cmd->parsed()) {
      auto corpus = clean_stage(cfg, out, report);
      auto store = open_store(cfg, true);
      try {
        entropy_stage(cfg, corpus, store, out, report);
      } catch (const EntropyError& e) {
        out << "entropy: skipped (" << e.what() << ")\n";
        report["entropy"] = {{"skipped", e.what()}};
      }
      timeline_stage(cfg, corpus, store, out, report);
      if (!cfg.evaluate.predictions.empty()) evaluate_stage(cfg, out, report);
      write_file(cfg.out / "report.json",
                 [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    }
  } catch (const ConfigError& e) {
    return fail(err, "config", e.what(), kUsage);
  } catch (const IoError& e) {
    return fail(err, "io", e.what(), kIo);
  } catch (const fs::filesystem_error& e) {
    return fail(err, "io", e.what(), kIo);
  } catch (const InferenceError& e) {
    return fail(err, "endpoint", e.what(), kFailure);
  } catch (const Error& e) {
    return fail(err, "input", e.what(), kFailure);
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what(), kFailure);
  }
  return kOk;
}

}  // namespace sentiflow::cli

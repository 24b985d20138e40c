#include "sentiflow/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "sentiflow/csv.hpp"

namespace sentiflow {

EntropySample sample_posts(SentimentLabel label, std::span<const std::string> posts, std::size_t n,
                           std::uint64_t seed) {
  if (posts.empty()) {
    throw EntropyError("no posts to sample for label " + std::string(to_string(label)));
  }
  EntropySample sample;
  sample.label = label;
  sample.requested_n = n;
  sample.seed = seed;
  sample.actual_n = std::min(n, posts.size());

  std::vector<std::size_t> idx(posts.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first actual_n slots end up a uniform sample.
  for (std::size_t i = 0; i < sample.actual_n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  sample.posts.reserve(sample.actual_n);
  for (std::size_t i = 0; i < sample.actual_n; ++i) sample.posts.push_back(posts[idx[i]]);
  return sample;
}

void CharFrequency::add(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < length;) {
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) cp = 0xFFFD;
    if (options_.strip_whitespace && u_isUWhiteSpace(cp)) continue;
    ++counts_[static_cast<char32_t>(cp)];
    ++total_;
  }
}

void CharFrequency::merge(const CharFrequency& other) {
  for (const auto& [cp, n] : other.counts_) counts_[cp] += n;
  total_ += other.total_;
}

double CharFrequency::entropy_bits() const {
  if (total_ == 0) throw EntropyError("entropy of an empty sample");
  // Sum in code point order so the result does not depend on hash layout.
  std::vector<std::pair<char32_t, std::uint64_t>> sorted(counts_.begin(), counts_.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(total_);
  double h = 0;
  for (const auto& [cp, c] : sorted) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h <= 0 ? 0.0 : h;
}

double char_entropy(const EntropySample& sample, const EntropyOptions& options) {
  CharFrequency freq(options);
  for (const auto& post : sample.posts) freq.add(post);
  return freq.entropy_bits();
}

double char_entropy(std::string_view text, const EntropyOptions& options) {
  CharFrequency freq(options);
  freq.add(text);
  return freq.entropy_bits();
}

const EntropyRow* EntropyReport::find(SentimentLabel label) const {
  for (const auto& r : rows) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

EntropyReport entropy_table(const std::map<SentimentLabel, double>& entropies) {
  for (auto label : kAllLabels) {
    if (!entropies.contains(label)) {
      throw EntropyError("missing entropy for label " + std::string(to_string(label)));
    }
  }
  EntropyReport report;
  for (auto label : kAllLabels) report.rows.push_back({label, entropies.at(label), 0, std::nullopt});
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const auto& a, const auto& b) { return a.entropy < b.entropy; });
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    report.rows[i].rank = i + 1;
    if (i + 1 < report.rows.size()) {
      report.rows[i].distance = report.rows[i + 1].entropy - report.rows[i].entropy;
    }
  }
  auto mean = [&](SentimentLabel a, SentimentLabel b) {
    return (entropies.at(a) + entropies.at(b)) / 2.0;
  };
  report.low_pair = {{SentimentLabel::Neutral, SentimentLabel::Positive},
                     mean(SentimentLabel::Neutral, SentimentLabel::Positive)};
  report.high_pair = {{SentimentLabel::Sarcastic, SentimentLabel::Negative},
                      mean(SentimentLabel::Sarcastic, SentimentLabel::Negative)};
  report.pair_distance = std::abs(report.high_pair.entropy - report.low_pair.entropy);
  return report;
}

std::string rank_name(std::size_t rank, std::size_t rows) {
  if (rows == 4) {
    static constexpr std::array<const char*, 4> kNames = {"Lowest", "Low", "High", "Highest"};
    if (rank >= 1 && rank <= 4) return kNames[rank - 1];
  }
  return std::to_string(rank);
}

void write_entropy_csv(std::ostream& out, const EntropyReport& report) {
  csv::write_row(out, {"type", "entropy", "rank", "distance", "pair_entropy", "pair_distance"});
  for (const auto& row : report.rows) {
    const bool low = row.label == SentimentLabel::Neutral || row.label == SentimentLabel::Positive;
    const auto& pair = low ? report.low_pair : report.high_pair;
    csv::write_row(out, {std::string(display_name(row.label)), csv::format_fixed(row.entropy, 5),
                         rank_name(row.rank, report.rows.size()),
                         row.distance ? csv::format_fixed(*row.distance, 5) : "-",
                         csv::format_fixed(pair.entropy, 5),
                         csv::format_fixed(report.pair_distance, 5)});
  }
}

}  // namespace sentiflow

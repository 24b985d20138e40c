#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentiflow/error.hpp"
#include "sentiflow/labels.hpp"

namespace sentiflow {

class EntropyError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultSampleSize = 15'000;

struct EntropySample {
  SentimentLabel label = SentimentLabel::Neutral;
  std::vector<std::string> posts;
  std::size_t requested_n = kDefaultSampleSize;
  std::size_t actual_n = 0;
  std::uint64_t seed = 0;
};

/// Uniform sample without replacement, reproducible for a given seed. Uses
/// the whole class when it has fewer than `n` posts. Throws EntropyError for
/// an empty class.
EntropySample sample_posts(SentimentLabel label, std::span<const std::string> posts,
                           std::size_t n = kDefaultSampleSize, std::uint64_t seed = 42);

struct EntropyOptions {
  /// Drop Unicode whitespace before counting.
  bool strip_whitespace = false;
};

/// Unicode scalar value counts. Shards can be merged in any order.
class CharFrequency {
 public:
  explicit CharFrequency(EntropyOptions options = {}) : options_(options) {}

  /// Ill-formed UTF-8 sequences count as U+FFFD.
  void add(std::string_view text);
  void merge(const CharFrequency& other);

  std::uint64_t total() const { return total_; }
  std::size_t distinct() const { return counts_.size(); }
  const std::unordered_map<char32_t, std::uint64_t>& counts() const { return counts_; }

  /// Shannon entropy in bits per character. Throws EntropyError when empty.
  double entropy_bits() const;

 private:
  EntropyOptions options_;
  std::unordered_map<char32_t, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Entropy of the character distribution over the concatenated sample.
double char_entropy(const EntropySample& sample, const EntropyOptions& options = {});
double char_entropy(std::string_view text, const EntropyOptions& options = {});

struct EntropyRow {
  SentimentLabel label = SentimentLabel::Neutral;
  double entropy = 0;
  /// 1 = lowest entropy.
  std::size_t rank = 0;
  /// Gap to the next-higher entropy; absent for the highest.
  std::optional<double> distance;
};

struct EntropyPair {
  std::array<SentimentLabel, 2> members{};
  /// Arithmetic mean of the members' entropies.
  double entropy = 0;
};

struct EntropyReport {
  /// Ascending entropy; ties keep label order.
  std::vector<EntropyRow> rows;
  /// {neutral, positive}
  EntropyPair low_pair;
  /// {sarcastic, negative}
  EntropyPair high_pair;
  /// |high_pair.entropy - low_pair.entropy|
  double pair_distance = 0;

  const EntropyRow* find(SentimentLabel label) const;
};

/// Throws EntropyError when any of the four labels is missing.
EntropyReport entropy_table(const std::map<SentimentLabel, double>& entropies);

/// "Lowest", "Low", "High", "Highest" for a four-row table.
std::string rank_name(std::size_t rank, std::size_t rows);

/// type,entropy,rank,distance,pair_entropy,pair_distance
void write_entropy_csv(std::ostream& out, const EntropyReport& report);

}  // namespace sentiflow

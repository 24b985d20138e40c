#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentiflow/error.hpp"
#include "sentiflow/labels.hpp"

namespace sentiflow {

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class MissingPredictionError : public EvaluationError {
 public:
  explicit MissingPredictionError(const std::string& id)
      : EvaluationError("no prediction for id " + id) {}
};

class DuplicateIdError : public EvaluationError {
 public:
  explicit DuplicateIdError(const std::string& id) : EvaluationError("duplicate id " + id) {}
};

class EmptyMatrixError : public EvaluationError {
 public:
  EmptyMatrixError() : EvaluationError("confusion matrix is empty") {}
};

class LabelSetMismatchError : public EvaluationError {
 public:
  using EvaluationError::EvaluationError;
};

/// Rows are true labels, columns predicted labels, both in kAllLabels order
/// (sarcastic, neutral, negative, positive).
class ConfusionMatrix {
 public:
  using Counts = std::array<std::array<std::uint64_t, kLabelCount>, kLabelCount>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Counts& counts) : counts_(counts) {}

  std::uint64_t at(SentimentLabel truth, SentimentLabel predicted) const {
    return counts_[index_of(truth)][index_of(predicted)];
  }
  void add(SentimentLabel truth, SentimentLabel predicted, std::uint64_t n = 1) {
    counts_[index_of(truth)][index_of(predicted)] += n;
  }
  std::uint64_t row_sum(SentimentLabel truth) const;
  std::uint64_t column_sum(SentimentLabel predicted) const;
  std::uint64_t total() const;
  const Counts& counts() const { return counts_; }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  Counts counts_{};
};

struct TruthLabel {
  std::string id;
  SentimentLabel label;
};

struct PredictedLabel {
  std::string id;
  LabelOutcome label;
};

struct ConfusionResult {
  ConfusionMatrix matrix;
  /// Truth ids whose prediction was unparsed; left out of the matrix.
  std::size_t excluded_unparsed = 0;
};

/// Throws MissingPredictionError or DuplicateIdError. Predictions for ids
/// absent from `truth` are ignored.
ConfusionResult confusion_matrix(std::span<const TruthLabel> truth,
                                 std::span<const PredictedLabel> predicted);

struct ClassMetrics {
  SentimentLabel label = SentimentLabel::Neutral;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::uint64_t support = 0;
  /// A precision or recall denominator was zero and the value was set to 0.
  bool degenerate = false;
};

struct MetricsReport {
  std::vector<ClassMetrics> classes;
  double weighted_f1 = 0;

  const ClassMetrics* find(SentimentLabel label) const;
};

/// Per-class precision, recall and F1 plus the support-weighted F1.
/// Throws EmptyMatrixError.
MetricsReport precision_recall_f1(const ConfusionMatrix& m);

/// Sum over classes of support * F1, divided by the total support.
/// Throws EmptyMatrixError.
double weighted_f1(const ConfusionMatrix& m);

struct NamedReport {
  std::string name;
  MetricsReport report;
};

enum class Metric { Precision, Recall, F1 };

struct ComparisonCell {
  double value = 0;
  /// value minus the first model's value
  double delta = 0;
  bool best = false;
};

struct ComparisonRow {
  SentimentLabel label;
  /// [model][metric]
  std::vector<std::array<ComparisonCell, 3>> cells;
};

struct ComparisonTable {
  std::vector<std::string> models;
  std::vector<ComparisonRow> rows;
  std::vector<ComparisonCell> weighted_f1;
};

/// Side-by-side metrics; the highest value per cell is marked best (ties mark
/// every tied model). Throws LabelSetMismatchError when label sets differ,
/// EvaluationError when fewer than two reports are given.
ComparisonTable compare_models(std::span<const NamedReport> reports);

/// id,label CSV (header row optional). Truth labels must be one of the four
/// words; predictions may also be "unparsed" or any reply parse_label rejects.
std::vector<TruthLabel> read_truth_csv(const std::filesystem::path& path);
std::vector<PredictedLabel> read_prediction_csv(const std::filesystem::path& path);

/// label,precision,recall,f1[,support] rows plus an optional "weighted" row
/// whose f1 column is the weighted F1. Lets published metric tables be
/// compared against computed ones.
MetricsReport read_metrics_csv(const std::filesystem::path& path);

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m);
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
void write_comparison_csv(std::ostream& out, const ComparisonTable& table);
/// Aligned plain-text table, one column group per model.
void write_comparison_text(std::ostream& out, const ComparisonTable& table);

}  // namespace sentiflow

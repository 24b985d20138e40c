#include "sentiflow/evaluation.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "sentiflow/csv.hpp"
#include "sentiflow/prompt.hpp"

namespace sentiflow {
namespace {

constexpr std::array<std::string_view, 3> kMetricNames = {"precision", "recall", "f1"};

double metric_value(const ClassMetrics& m, std::size_t metric) {
  switch (metric) {
    case 0:
      return m.precision;
    case 1:
      return m.recall;
    default:
      return m.f1;
  }
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    rows.push_back(fields);
  }
  return rows;
}

double parse_number(const std::string& text, const std::string& where) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw EvaluationError(where + ": not a number: " + text);
  }
  return v;
}

}  // namespace

std::uint64_t ConfusionMatrix::row_sum(SentimentLabel truth) const {
  std::uint64_t s = 0;
  for (auto v : counts_[index_of(truth)]) s += v;
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(SentimentLabel predicted) const {
  std::uint64_t s = 0;
  for (const auto& row : counts_) s += row[index_of(predicted)];
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (const auto& row : counts_) {
    for (auto v : row) s += v;
  }
  return s;
}

ConfusionResult confusion_matrix(std::span<const TruthLabel> truth,
                                 std::span<const PredictedLabel> predicted) {
  std::unordered_map<std::string_view, const LabelOutcome*> by_id;
  by_id.reserve(predicted.size());
  for (const auto& p : predicted) {
    if (!by_id.emplace(p.id, &p.label).second) throw DuplicateIdError(p.id);
  }
  ConfusionResult result;
  std::unordered_set<std::string_view> seen;
  for (const auto& t : truth) {
    if (!seen.insert(t.id).second) throw DuplicateIdError(t.id);
    auto it = by_id.find(t.id);
    if (it == by_id.end()) throw MissingPredictionError(t.id);
    if (!*it->second) {
      ++result.excluded_unparsed;
      continue;
    }
    result.matrix.add(t.label, **it->second);
  }
  return result;
}

const ClassMetrics* MetricsReport::find(SentimentLabel label) const {
  for (const auto& c : classes) {
    if (c.label == label) return &c;
  }
  return nullptr;
}

MetricsReport precision_recall_f1(const ConfusionMatrix& m) {
  if (m.total() == 0) throw EmptyMatrixError();
  MetricsReport report;
  for (auto label : kAllLabels) {
    ClassMetrics c;
    c.label = label;
    const auto hit = static_cast<double>(m.at(label, label));
    const auto predicted = m.column_sum(label);
    const auto actual = m.row_sum(label);
    c.support = actual;
    if (predicted > 0) {
      c.precision = hit / static_cast<double>(predicted);
    } else {
      c.degenerate = true;
    }
    if (actual > 0) {
      c.recall = hit / static_cast<double>(actual);
    } else {
      c.degenerate = true;
    }
    if (c.precision + c.recall > 0) c.f1 = 2 * c.precision * c.recall / (c.precision + c.recall);
    report.classes.push_back(c);
  }
  report.weighted_f1 = weighted_f1(m);
  return report;
}

double weighted_f1(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw EmptyMatrixError();
  double acc = 0;
  for (auto label : kAllLabels) {
    const auto hit = static_cast<double>(m.at(label, label));
    const auto predicted = m.column_sum(label);
    const auto actual = m.row_sum(label);
    if (hit == 0) continue;
    const double p = hit / static_cast<double>(predicted);
    const double r = hit / static_cast<double>(actual);
    acc += static_cast<double>(actual) * (2 * p * r / (p + r));
  }
  return acc / static_cast<double>(total);
}

ComparisonTable compare_models(std::span<const NamedReport> reports) {
  if (reports.size() < 2) throw EvaluationError("comparison needs at least two reports");
  auto label_set = [](const MetricsReport& r) {
    std::vector<SentimentLabel> labels;
    for (const auto& c : r.classes) labels.push_back(c.label);
    std::sort(labels.begin(), labels.end());
    return labels;
  };
  const auto reference = label_set(reports[0].report);
  for (const auto& r : reports) {
    if (label_set(r.report) != reference) {
      throw LabelSetMismatchError("label set of '" + r.name + "' differs from '" +
                                  reports[0].name + "'");
    }
  }

  ComparisonTable table;
  for (const auto& r : reports) table.models.push_back(r.name);
  for (auto label : kAllLabels) {
    if (!reports[0].report.find(label)) continue;
    ComparisonRow row{label, {}};
    row.cells.resize(reports.size());
    for (std::size_t metric = 0; metric < 3; ++metric) {
      const double base = metric_value(*reports[0].report.find(label), metric);
      double best = -1;
      for (std::size_t m = 0; m < reports.size(); ++m) {
        const double v = metric_value(*reports[m].report.find(label), metric);
        row.cells[m][metric] = {v, v - base, false};
        best = std::max(best, v);
      }
      for (auto& cells : row.cells) cells[metric].best = cells[metric].value == best;
    }
    table.rows.push_back(std::move(row));
  }
  double best = -1;
  for (const auto& r : reports) {
    table.weighted_f1.push_back({r.report.weighted_f1,
                                 r.report.weighted_f1 - reports[0].report.weighted_f1, false});
    best = std::max(best, r.report.weighted_f1);
  }
  for (auto& c : table.weighted_f1) c.best = c.value == best;
  return table;
}

std::vector<TruthLabel> read_truth_csv(const std::filesystem::path& path) {
  std::vector<TruthLabel> out;
  auto rows = read_rows(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && row.size() >= 2 && row[0] == "id" && row[1] == "label") continue;
    auto where = path.string() + ":" + std::to_string(i + 1);
    if (row.size() < 2) throw EvaluationError(where + ": expected id,label");
    auto label = parse_label(row[1]);
    if (!label) throw EvaluationError(where + ": unknown truth label " + row[1]);
    out.push_back({row[0], *label});
  }
  return out;
}

std::vector<PredictedLabel> read_prediction_csv(const std::filesystem::path& path) {
  std::vector<PredictedLabel> out;
  auto rows = read_rows(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && row.size() >= 2 && row[0] == "id" && row[1] == "label") continue;
    if (row.size() < 2) {
      throw EvaluationError(path.string() + ":" + std::to_string(i + 1) + ": expected id,label");
    }
    out.push_back({row[0], parse_label(row[1])});
  }
  return out;
}

MetricsReport read_metrics_csv(const std::filesystem::path& path) {
  MetricsReport report;
  bool have_weighted = false;
  auto rows = read_rows(path);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (i == 0 && !row.empty() && row[0] == "label") continue;
    auto where = path.string() + ":" + std::to_string(i + 1);
    if (row.size() < 4) throw EvaluationError(where + ": expected label,precision,recall,f1");
    if (row[0] == "weighted") {
      report.weighted_f1 = parse_number(row[3], where);
      have_weighted = true;
      continue;
    }
    auto label = label_from_word(row[0]);
    if (!label) throw EvaluationError(where + ": unknown label " + row[0]);
    if (report.find(*label)) throw EvaluationError(where + ": repeated label " + row[0]);
    ClassMetrics c;
    c.label = *label;
    c.precision = parse_number(row[1], where);
    c.recall = parse_number(row[2], where);
    c.f1 = parse_number(row[3], where);
    if (row.size() > 4 && !row[4].empty()) {
      c.support = static_cast<std::uint64_t>(parse_number(row[4], where));
    }
    report.classes.push_back(c);
  }
  if (!have_weighted) throw EvaluationError(path.string() + ": missing 'weighted' row");
  std::sort(report.classes.begin(), report.classes.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });
  return report;
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& m) {
  std::vector<std::string> header = {"truth\\predicted"};
  for (auto l : kAllLabels) header.emplace_back(to_string(l));
  csv::write_row(out, header);
  for (auto t : kAllLabels) {
    std::vector<std::string> row = {std::string(to_string(t))};
    for (auto p : kAllLabels) row.push_back(std::to_string(m.at(t, p)));
    csv::write_row(out, row);
  }
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  csv::write_row(out, {"label", "precision", "recall", "f1", "support"});
  std::uint64_t total = 0;
  for (const auto& c : report.classes) {
    total += c.support;
    csv::write_row(out, {std::string(to_string(c.label)), csv::format_fixed(c.precision, 6),
                         csv::format_fixed(c.recall, 6), csv::format_fixed(c.f1, 6),
                         std::to_string(c.support)});
  }
  csv::write_row(out, {"weighted", "", "", csv::format_fixed(report.weighted_f1, 6),
                       std::to_string(total)});
}

void write_comparison_csv(std::ostream& out, const ComparisonTable& table) {
  csv::write_row(out, {"label", "model", "metric", "value", "delta", "best"});
  for (const auto& row : table.rows) {
    for (std::size_t m = 0; m < table.models.size(); ++m) {
      for (std::size_t k = 0; k < 3; ++k) {
        const auto& cell = row.cells[m][k];
        csv::write_row(out, {std::string(to_string(row.label)), table.models[m],
                             std::string(kMetricNames[k]), csv::format_fixed(cell.value, 6),
                             csv::format_fixed(cell.delta, 6), cell.best ? "1" : "0"});
      }
    }
  }
  for (std::size_t m = 0; m < table.models.size(); ++m) {
    const auto& cell = table.weighted_f1[m];
    csv::write_row(out, {"weighted", table.models[m], "f1", csv::format_fixed(cell.value, 6),
                         csv::format_fixed(cell.delta, 6), cell.best ? "1" : "0"});
  }
}

void write_comparison_text(std::ostream& out, const ComparisonTable& table) {
  constexpr int kLabelWidth = 10;
  constexpr int kCell = 11;
  const int group = kCell * 3;
  out << std::left << std::setw(kLabelWidth) << "";
  for (const auto& name : table.models) out << "| " << std::setw(group - 2) << name;
  out << "|\n" << std::setw(kLabelWidth) << "Metric>";
  for (std::size_t m = 0; m < table.models.size(); ++m) {
    out << "| " << std::setw(kCell - 2) << "Precision" << "| " << std::setw(kCell - 2) << "Recall"
        << "| " << std::setw(kCell - 2) << "F1-score";
  }
  out << "|\n";
  auto cell_text = [](const ComparisonCell& c) {
    return csv::format_fixed(c.value, 4) + (c.best ? " *" : "");
  };
  for (const auto& row : table.rows) {
    out << std::setw(kLabelWidth) << display_name(row.label);
    for (const auto& cells : row.cells) {
      for (const auto& c : cells) out << "| " << std::setw(kCell - 2) << cell_text(c);
    }
    out << "|\n";
  }
  out << std::setw(kLabelWidth) << "Weighted";
  for (const auto& c : table.weighted_f1) {
    out << "| " << std::setw(kCell - 2) << "" << "| " << std::setw(kCell - 2) << ""
        << "| " << std::setw(kCell - 2) << cell_text(c);
  }
  out << "|\n(* best value per cell)\n";
}

}  // namespace sentiflow

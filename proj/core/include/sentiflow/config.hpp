#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentiflow/entropy.hpp"
#include "sentiflow/inference_client.hpp"
#include "sentiflow/ingest.hpp"
#include "sentiflow/repost.hpp"
#include "sentiflow/timeline.hpp"

namespace sentiflow {

struct NamedPath {
  std::string name;
  std::filesystem::path path;
};

struct EvaluateConfig {
  std::optional<std::filesystem::path> truth;
  /// Prediction CSVs, one per model; metrics are computed from them.
  std::vector<NamedPath> predictions;
  /// Pre-computed metric tables (label,precision,recall,f1 + weighted row).
  std::vector<NamedPath> reference_metrics;
};

/// Everything a pipeline run needs. Relative paths in a config file resolve
/// against the file's directory.
struct PipelineConfig {
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> store;
  std::filesystem::path out = "out";
  std::uint64_t seed = 42;
  DateRange date_range;
  Resolution resolution = Resolution::Week;
  ShareScope scope = ShareScope::All;
  unsigned workers = 1;

  IngestOptions ingest;
  RepostRules repost_rules;
  EndpointConfig endpoint;
  std::optional<std::filesystem::path> examples_file;

  std::size_t batch_size = 64;
  std::size_t requery_rounds = 0;

  std::size_t entropy_sample_size = kDefaultSampleSize;
  EntropyOptions entropy;
  bool entropy_include_reposts = false;
  bool reposts_in_distinct = true;

  EvaluateConfig evaluate;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
PipelineConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace sentiflow

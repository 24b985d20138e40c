#include "sentiflow/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace sentiflow {
namespace {

using json = nlohmann::json;

// Rejects keys outside `allowed` so typos fail loudly.
void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
std::optional<T> get(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<NamedPath> named_paths(const json& obj, const std::string& key,
                                   const std::string& where, const std::filesystem::path& base) {
  std::vector<NamedPath> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) throw ConfigError(where + "." + key + ": expected an array");
  for (const auto& item : *it) {
    check_keys(item, where + "." + key + "[]", {"name", "path"});
    auto name = get<std::string>(item, "name", where + "." + key);
    auto path = get<std::string>(item, "path", where + "." + key);
    if (!name || !path) throw ConfigError(where + "." + key + ": entries need name and path");
    out.push_back({*name, resolve(base, *path)});
  }
  return out;
}

Date date_or_throw(const std::string& text, const std::string& where) {
  auto d = parse_date(text);
  if (!d) throw ConfigError(where + ": expected YYYY-MM-DD, got '" + text + "'");
  return *d;
}

}  // namespace

PipelineConfig config_from_json(const json& doc, const std::filesystem::path& base) {
  check_keys(doc, "config",
             {"input", "store", "out", "seed", "date_range", "resolution", "scope", "workers",
              "ingest", "repost_rules", "endpoint", "prompt", "classify", "entropy", "timeline",
              "evaluate"});
  PipelineConfig cfg;
  if (auto v = get<std::string>(doc, "input", "config")) cfg.input = resolve(base, *v);
  if (auto v = get<std::string>(doc, "store", "config")) cfg.store = resolve(base, *v);
  if (auto v = get<std::string>(doc, "out", "config")) cfg.out = resolve(base, *v);
  if (auto v = get<std::uint64_t>(doc, "seed", "config")) cfg.seed = *v;
  if (auto v = get<unsigned>(doc, "workers", "config")) cfg.workers = std::max(1u, *v);
  if (auto v = get<std::string>(doc, "resolution", "config")) {
    auto r = resolution_from_name(*v);
    if (!r) throw ConfigError("config.resolution: expected week or day");
    cfg.resolution = *r;
  }
  if (auto v = get<std::string>(doc, "scope", "config")) {
    auto s = share_scope_from_name(*v);
    if (!s) throw ConfigError("config.scope: expected all or distinct");
    cfg.scope = *s;
  }
  if (auto it = doc.find("date_range"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.date_range", {"from", "to"});
    if (auto v = get<std::string>(*it, "from", "config.date_range")) {
      cfg.date_range.from = date_or_throw(*v, "config.date_range.from");
    }
    if (auto v = get<std::string>(*it, "to", "config.date_range")) {
      cfg.date_range.to = date_or_throw(*v, "config.date_range.to");
    }
  }

  if (auto it = doc.find("ingest"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.ingest", {"timestamp_formats", "aliases"});
    if (auto formats = get<std::vector<std::string>>(*it, "timestamp_formats", "config.ingest")) {
      cfg.ingest.timestamps.priority.clear();
      for (const auto& name : *formats) {
        auto f = timestamp_format_from_name(name);
        if (!f) throw ConfigError("config.ingest.timestamp_formats: unknown format '" + name + "'");
        cfg.ingest.timestamps.priority.push_back(*f);
      }
      if (cfg.ingest.timestamps.priority.empty()) {
        throw ConfigError("config.ingest.timestamp_formats: must not be empty");
      }
    }
    if (auto aliases = it->find("aliases"); aliases != it->end() && !aliases->is_null()) {
      if (!aliases->is_object()) throw ConfigError("config.ingest.aliases: expected an object");
      for (const auto& [field, keys] : aliases->items()) {
        auto f = field_from_name(field);
        if (!f) throw ConfigError("config.ingest.aliases: unknown field '" + field + "'");
        if (!keys.is_array()) throw ConfigError("config.ingest.aliases." + field + ": expected array");
        for (const auto& k : keys) {
          if (!k.is_string()) throw ConfigError("config.ingest.aliases." + field + ": expected strings");
          cfg.ingest.fields.add_alias(*f, k.get<std::string>());
        }
      }
    }
  }

  if (auto it = doc.find("repost_rules"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.repost_rules", {"metadata", "trailing_slashes", "inline_mention"});
    if (auto v = get<bool>(*it, "metadata", "config.repost_rules")) cfg.repost_rules.metadata = *v;
    if (auto v = get<bool>(*it, "trailing_slashes", "config.repost_rules")) {
      cfg.repost_rules.trailing_slashes = *v;
    }
    if (auto v = get<bool>(*it, "inline_mention", "config.repost_rules")) {
      cfg.repost_rules.inline_mention = *v;
    }
  }

  if (auto it = doc.find("endpoint"); it != doc.end() && !it->is_null()) {
    const std::string w = "config.endpoint";
    check_keys(*it, w,
               {"base_url", "model", "temperature", "max_tokens", "timeout_ms", "max_attempts",
                "max_in_flight", "requests_per_second", "backoff_ms", "split_roles", "api_key_env"});
    auto& e = cfg.endpoint;
    if (auto v = get<std::string>(*it, "base_url", w)) e.base_url = *v;
    if (auto v = get<std::string>(*it, "model", w)) e.model_name = *v;
    if (auto v = get<double>(*it, "temperature", w)) e.temperature = *v;
    if (auto v = get<int>(*it, "max_tokens", w)) e.max_tokens = *v;
    if (auto v = get<std::int64_t>(*it, "timeout_ms", w)) e.timeout = std::chrono::milliseconds(*v);
    if (auto v = get<int>(*it, "max_attempts", w)) e.max_attempts = *v;
    if (auto v = get<int>(*it, "max_in_flight", w)) e.max_in_flight = *v;
    if (auto v = get<double>(*it, "requests_per_second", w)) e.requests_per_second = *v;
    if (auto v = get<std::int64_t>(*it, "backoff_ms", w)) {
      e.backoff_initial = std::chrono::milliseconds(*v);
    }
    if (auto v = get<bool>(*it, "split_roles", w)) e.split_roles = *v;
    if (auto v = get<std::string>(*it, "api_key_env", w)) e.api_key_env = *v;
    e.validate();
  }

  if (auto it = doc.find("prompt"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.prompt", {"examples_file"});
    if (auto v = get<std::string>(*it, "examples_file", "config.prompt")) {
      cfg.examples_file = resolve(base, *v);
    }
  }

  if (auto it = doc.find("classify"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.classify", {"batch_size", "requery_rounds"});
    if (auto v = get<std::size_t>(*it, "batch_size", "config.classify")) {
      if (*v == 0) throw ConfigError("config.classify.batch_size: must be >= 1");
      cfg.batch_size = *v;
    }
    if (auto v = get<std::size_t>(*it, "requery_rounds", "config.classify")) cfg.requery_rounds = *v;
  }

  if (auto it = doc.find("entropy"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.entropy", {"sample_size", "strip_whitespace", "include_reposts"});
    if (auto v = get<std::size_t>(*it, "sample_size", "config.entropy")) {
      if (*v == 0) throw ConfigError("config.entropy.sample_size: must be >= 1");
      cfg.entropy_sample_size = *v;
    }
    if (auto v = get<bool>(*it, "strip_whitespace", "config.entropy")) {
      cfg.entropy.strip_whitespace = *v;
    }
    if (auto v = get<bool>(*it, "include_reposts", "config.entropy")) {
      cfg.entropy_include_reposts = *v;
    }
  }

  if (auto it = doc.find("timeline"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.timeline", {"reposts_in_distinct"});
    if (auto v = get<bool>(*it, "reposts_in_distinct", "config.timeline")) {
      cfg.reposts_in_distinct = *v;
    }
  }

  if (auto it = doc.find("evaluate"); it != doc.end() && !it->is_null()) {
    check_keys(*it, "config.evaluate", {"truth", "predictions", "reference_metrics"});
    if (auto v = get<std::string>(*it, "truth", "config.evaluate")) {
      cfg.evaluate.truth = resolve(base, *v);
    }
    cfg.evaluate.predictions = named_paths(*it, "predictions", "config.evaluate", base);
    cfg.evaluate.reference_metrics = named_paths(*it, "reference_metrics", "config.evaluate", base);
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc = json::parse(in, nullptr, false, /*ignore_comments=*/true);
  if (doc.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(doc, path.parent_path());
}

}  // namespace sentiflow

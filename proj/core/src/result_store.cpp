#include "sentiflow/result_store.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "sentiflow/error.hpp"

namespace sentiflow {

using json = nlohmann::json;

json to_json(const ClassificationRecord& r) {
  json doc = {{"weibo_id", r.weibo_id},
              {"label", to_string(r.label)},
              {"raw_output", r.raw_output},
              {"attempts", r.attempts},
              {"classified_at", format_iso8601(r.classified_at)},
              {"model_name", r.model_name}};
  if (r.inherited_from) doc["inherited_from"] = *r.inherited_from;
  if (r.error) doc["error"] = *r.error;
  return doc;
}

ClassificationRecord record_from_json(const json& doc) {
  if (!doc.is_object()) throw Error("store record is not an object");
  auto text = [&](const char* key) -> std::string {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_string()) throw Error(std::string("store record lacks ") + key);
    return it->get<std::string>();
  };
  ClassificationRecord r;
  r.weibo_id = text("weibo_id");
  if (!outcome_from_word(text("label"), r.label)) throw Error("store record has unknown label");
  r.raw_output = text("raw_output");
  auto attempts = doc.find("attempts");
  if (attempts == doc.end() || !attempts->is_number_integer()) {
    throw Error("store record lacks attempts");
  }
  r.attempts = attempts->get<int>();
  auto at = parse_timestamp(text("classified_at"));
  if (!at) throw Error("store record has bad classified_at");
  r.classified_at = *at;
  r.model_name = text("model_name");
  if (auto it = doc.find("inherited_from"); it != doc.end() && it->is_string()) {
    r.inherited_from = it->get<std::string>();
  }
  if (auto it = doc.find("error"); it != doc.end() && it->is_string()) r.error = it->get<std::string>();
  return r;
}

ResultStore ResultStore::in_memory() { return ResultStore(); }

ResultStore ResultStore::open(const std::filesystem::path& path) {
  ResultStore store;
  store.path_ = path;

  std::uintmax_t complete_bytes = 0;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read result store: " + path.string());
    std::string line;
    std::uintmax_t offset = 0;
    while (std::getline(in, line)) {
      const bool terminated = !in.eof();
      offset += line.size() + (terminated ? 1 : 0);
      if (!terminated) break;  // torn tail, handled below
      complete_bytes = offset;
      auto doc = json::parse(line, nullptr, false);
      try {
        if (doc.is_discarded()) throw Error("bad json");
        store.apply(record_from_json(doc));
      } catch (const Error&) {
        ++store.skipped_lines_;
      }
    }
    if (in.bad()) throw IoError("read failure in result store: " + path.string());
    in.close();
    const auto size = std::filesystem::file_size(path);
    if (size > complete_bytes) {
      store.repaired_bytes_ = static_cast<std::size_t>(size - complete_bytes);
      std::filesystem::resize_file(path, complete_bytes);
    }
  }
  store.out_.open(path, std::ios::binary | std::ios::app);
  if (!store.out_) throw IoError("cannot open result store for append: " + path.string());
  return store;
}

void ResultStore::apply(ClassificationRecord record) {
  auto key = record.weibo_id;
  effective_.insert_or_assign(std::move(key), std::move(record));
}

void ResultStore::append(std::span<const ClassificationRecord> records) {
  if (path_) {
    for (const auto& r : records) {
      out_ << to_json(r).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    }
    out_.flush();
    if (!out_) throw IoError("failed appending to result store: " + path_->string());
  }
  for (const auto& r : records) apply(r);
  appended_ += records.size();
}

const ClassificationRecord* ResultStore::find(std::string_view weibo_id) const {
  auto it = effective_.find(std::string(weibo_id));
  return it == effective_.end() ? nullptr : &it->second;
}

std::vector<ClassificationRecord> ResultStore::effective_records() const {
  std::vector<ClassificationRecord> out;
  out.reserve(effective_.size());
  for (const auto& [id, r] : effective_) out.push_back(r);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.weibo_id < b.weibo_id; });
  return out;
}

}  // namespace sentiflow

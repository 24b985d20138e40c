#include "sentiflow/ingest.hpp"

#include <nlohmann/json.hpp>

#include "sentiflow/error.hpp"

namespace sentiflow {
namespace {

using json = nlohmann::json;

constexpr Field kAllFields[] = {Field::WeiboId,         Field::UserId,        Field::Content,
                                Field::Timestamp,       Field::From,          Field::RepostContent,
                                Field::RepostImages,    Field::RepostTimestamp, Field::RepostUsername};

RecordError make_error(RecordErrorKind kind, Field field, std::string detail) {
  return RecordError{kind, std::string(field_name(field)), std::move(detail), 0};
}

// First present, non-null value among the field's keys.
const json* lookup(const json& object, const FieldKeys& keys, Field field) {
  for (const auto& key : keys[field]) {
    auto it = object.find(key);
    if (it != object.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

// Identifier fields may be JSON strings or integers.
std::optional<std::string> as_id(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return value.dump();
  return std::nullopt;
}

}  // namespace

std::string RecordError::reason() const {
  switch (kind) {
    case RecordErrorKind::MalformedJson:
      return "malformed_json";
    case RecordErrorKind::MissingRequiredField:
      return "missing_field:" + field;
    case RecordErrorKind::InvalidField:
      return "invalid_field:" + field;
    case RecordErrorKind::BadTimestamp:
      return "bad_timestamp:" + field;
  }
  return "unknown";
}

std::string_view field_name(Field field) {
  switch (field) {
    case Field::WeiboId:
      return "weibo_id";
    case Field::UserId:
      return "user_id";
    case Field::Content:
      return "content";
    case Field::Timestamp:
      return "timestamp";
    case Field::From:
      return "source_device";
    case Field::RepostContent:
      return "repost_content";
    case Field::RepostImages:
      return "repost_images";
    case Field::RepostTimestamp:
      return "repost_timestamp";
    case Field::RepostUsername:
      return "repost_username";
  }
  return "unknown";
}

std::optional<Field> field_from_name(std::string_view name) {
  for (auto f : kAllFields) {
    if (field_name(f) == name) return f;
  }
  return std::nullopt;
}

FieldKeys FieldKeys::defaults() {
  FieldKeys k;
  k.keys[Field::WeiboId] = {"Weibo_ID"};
  k.keys[Field::UserId] = {"User_ID"};
  k.keys[Field::Content] = {"Content"};
  k.keys[Field::Timestamp] = {"Timestamp"};
  k.keys[Field::From] = {"From"};
  k.keys[Field::RepostContent] = {"Repost - Content"};
  k.keys[Field::RepostImages] = {"Repost - Imgs"};
  k.keys[Field::RepostTimestamp] = {"Repost - Timestamp"};
  k.keys[Field::RepostUsername] = {"Repost - Username"};
  return k;
}

void FieldKeys::add_alias(Field field, std::string key) { keys[field].push_back(std::move(key)); }

const std::vector<std::string>& FieldKeys::operator[](Field field) const {
  static const std::vector<std::string> kNone;
  auto it = keys.find(field);
  return it == keys.end() ? kNone : it->second;
}

ParseResult parse_record(std::string_view line, const IngestOptions& options) {
  json doc = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return RecordError{RecordErrorKind::MalformedJson, "", "not valid JSON", 0};
  if (!doc.is_object()) {
    return RecordError{RecordErrorKind::MalformedJson, "", "record is not a JSON object", 0};
  }
  const auto& keys = options.fields;
  PostRecord rec;

  const json* id = lookup(doc, keys, Field::WeiboId);
  if (!id) return make_error(RecordErrorKind::MissingRequiredField, Field::WeiboId, "");
  auto id_text = as_id(*id);
  if (!id_text || id_text->empty()) {
    return make_error(RecordErrorKind::InvalidField, Field::WeiboId, "expected non-empty id");
  }
  rec.weibo_id = std::move(*id_text);

  const json* content = lookup(doc, keys, Field::Content);
  if (!content) return make_error(RecordErrorKind::MissingRequiredField, Field::Content, "");
  if (!content->is_string()) {
    return make_error(RecordErrorKind::InvalidField, Field::Content, "expected string");
  }
  rec.content = content->get<std::string>();

  const json* ts = lookup(doc, keys, Field::Timestamp);
  if (!ts) return make_error(RecordErrorKind::MissingRequiredField, Field::Timestamp, "");
  auto instant = parse_timestamp_value(*ts, options.timestamps);
  if (!instant) return make_error(RecordErrorKind::BadTimestamp, Field::Timestamp, ts->dump());
  rec.timestamp = *instant;

  if (const json* user = lookup(doc, keys, Field::UserId)) {
    auto text = as_id(*user);
    if (!text) return make_error(RecordErrorKind::InvalidField, Field::UserId, "expected id");
    rec.user_id = std::move(*text);
  }

  // Optional text fields: empty strings count as absent.
  auto optional_text = [&](Field field,
                           std::optional<std::string>& out) -> std::optional<RecordError> {
    const json* v = lookup(doc, keys, field);
    if (!v) return std::nullopt;
    auto text = as_id(*v);
    if (!text) return make_error(RecordErrorKind::InvalidField, field, "expected string");
    if (!text->empty()) out = std::move(*text);
    return std::nullopt;
  };
  if (auto e = optional_text(Field::From, rec.source_device)) return *e;
  if (auto e = optional_text(Field::RepostContent, rec.repost_content)) return *e;
  if (auto e = optional_text(Field::RepostUsername, rec.repost_username)) return *e;

  if (const json* imgs = lookup(doc, keys, Field::RepostImages)) {
    std::vector<std::string> refs;
    if (imgs->is_string()) {
      if (!imgs->get_ref<const std::string&>().empty()) refs.push_back(imgs->get<std::string>());
    } else if (imgs->is_array()) {
      for (const auto& item : *imgs) {
        if (!item.is_string()) {
          return make_error(RecordErrorKind::InvalidField, Field::RepostImages,
                            "expected array of strings");
        }
        refs.push_back(item.get<std::string>());
      }
    } else {
      return make_error(RecordErrorKind::InvalidField, Field::RepostImages,
                        "expected string or array");
    }
    if (!refs.empty()) rec.repost_images = std::move(refs);
  }

  if (const json* rts = lookup(doc, keys, Field::RepostTimestamp)) {
    bool empty_text = rts->is_string() && rts->get_ref<const std::string&>().empty();
    if (!empty_text) {
      auto parsed = parse_timestamp_value(*rts, options.timestamps);
      if (!parsed) {
        return make_error(RecordErrorKind::BadTimestamp, Field::RepostTimestamp, rts->dump());
      }
      rec.repost_timestamp = *parsed;
    }
  }
  return rec;
}

std::string serialize_record(const PostRecord& record) {
  const auto defaults = FieldKeys::defaults();
  auto key = [&](Field f) { return defaults[f].front(); };
  json doc = json::object();
  doc[key(Field::WeiboId)] = record.weibo_id;
  doc[key(Field::UserId)] = record.user_id;
  doc[key(Field::Content)] = record.content;
  doc[key(Field::Timestamp)] = format_iso8601(record.timestamp);
  if (record.source_device) doc[key(Field::From)] = *record.source_device;
  if (record.repost_content) doc[key(Field::RepostContent)] = *record.repost_content;
  if (record.repost_images) doc[key(Field::RepostImages)] = *record.repost_images;
  if (record.repost_timestamp) {
    doc[key(Field::RepostTimestamp)] = format_iso8601(*record.repost_timestamp);
  }
  if (record.repost_username) doc[key(Field::RepostUsername)] = *record.repost_username;
  return doc.dump(-1, ' ', false, json::error_handler_t::replace);
}

CorpusReader::CorpusReader(const std::filesystem::path& path, IngestOptions options,
                           std::ostream* error_sink)
    : in_(path, std::ios::binary), options_(std::move(options)), error_sink_(error_sink) {
  if (!in_) throw IoError("cannot open input file: " + path.string());
}

std::optional<ParseResult> CorpusReader::next() {
  if (!std::getline(in_, line_)) {
    if (in_.bad()) throw IoError("read failure after line " + std::to_string(stats_.total_lines));
    return std::nullopt;
  }
  if (!line_.empty() && line_.back() == '\r') line_.pop_back();
  ++stats_.total_lines;
  ParseResult result = parse_record(line_, options_);
  if (auto* err = std::get_if<RecordError>(&result)) {
    err->line_no = stats_.total_lines;
    ++stats_.rejected;
    ++stats_.rejection_reasons[err->reason()];
    if (error_sink_) *error_sink_ << err->line_no << '\t' << err->reason() << '\n';
  } else {
    ++stats_.parsed;
  }
  return result;
}

LoadedCorpus load_corpus(const std::filesystem::path& path, const IngestOptions& options,
                         const std::optional<std::filesystem::path>& error_sidecar) {
  std::ofstream sidecar;
  if (error_sidecar) {
    sidecar.open(*error_sidecar, std::ios::binary | std::ios::trunc);
    if (!sidecar) throw IoError("cannot write error sidecar: " + error_sidecar->string());
  }
  CorpusReader reader(path, options, error_sidecar ? &sidecar : nullptr);
  LoadedCorpus out;
  while (auto item = reader.next()) {
    if (auto* rec = std::get_if<PostRecord>(&*item)) out.records.push_back(std::move(*rec));
  }
  out.stats = reader.stats();
  if (sidecar.is_open() && !sidecar) throw IoError("failed writing error sidecar");
  return out;
}

}  // namespace sentiflow

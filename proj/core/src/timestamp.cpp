#include "sentiflow/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace sentiflow {
namespace {

using namespace std::chrono;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Parses exactly `width` digits at s[pos].
bool read_fixed(std::string_view s, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > s.size()) return false;
  auto part = s.substr(pos, width);
  if (!all_digits(part)) return false;
  std::from_chars(part.data(), part.data() + part.size(), out);
  return true;
}

std::optional<Date> read_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_fixed(s, 0, 4, y) || !read_fixed(s, 5, 2, m) || !read_fixed(s, 8, 2, d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

// Parses "HH:MM" or "HH:MM:SS" starting at pos; advances pos.
std::optional<seconds> read_time(std::string_view s, std::size_t& pos) {
  int h = 0, mi = 0, sec = 0;
  if (!read_fixed(s, pos, 2, h) || pos + 2 >= s.size() || s[pos + 2] != ':' ||
      !read_fixed(s, pos + 3, 2, mi)) {
    return std::nullopt;
  }
  pos += 5;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_fixed(s, pos + 1, 2, sec)) return std::nullopt;
    pos += 3;
  }
  if (h > 23 || mi > 59 || sec > 59) return std::nullopt;
  return hours{h} + minutes{mi} + seconds{sec};
}

std::optional<Instant> parse_epoch(std::string_view s) {
  std::string_view digits = s;
  if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
  if (!all_digits(digits)) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return Instant{seconds{v}};
}

std::optional<Instant> parse_datetime(std::string_view s) {
  if (s.size() < 16 || s[10] != ' ') return std::nullopt;
  auto date = read_date(s);
  if (!date) return std::nullopt;
  std::size_t pos = 11;
  auto tod = read_time(s, pos);
  if (!tod || pos != s.size()) return std::nullopt;
  return Instant{*date} + *tod;
}

std::optional<Instant> parse_iso(std::string_view s) {
  auto date = read_date(s);
  if (!date) return std::nullopt;
  if (s.size() == 10) return Instant{*date};
  if (s[10] != 'T' && s[10] != 't') return std::nullopt;
  std::size_t pos = 11;
  auto tod = read_time(s, pos);
  if (!tod) return std::nullopt;
  if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
    ++pos;
    std::size_t start = pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    if (pos == start) return std::nullopt;
  }
  seconds offset{0};
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = 0, om = 0;
      if (!read_fixed(s, pos + 1, 2, oh)) return std::nullopt;
      std::size_t after = pos + 3;
      if (after < s.size() && s[after] == ':') ++after;
      if (!read_fixed(s, after, 2, om)) return std::nullopt;
      if (oh > 23 || om > 59) return std::nullopt;
      offset = hours{oh} + minutes{om};
      if (c == '-') offset = -offset;
      pos = after + 2;
    } else {
      return std::nullopt;
    }
  }
  if (pos != s.size()) return std::nullopt;
  return Instant{*date} + *tod - offset;
}

}  // namespace

std::optional<Instant> parse_timestamp(std::string_view raw, const TimestampOptions& options) {
  for (auto format : options.priority) {
    std::optional<Instant> parsed;
    switch (format) {
      case TimestampFormat::EpochSeconds:
        parsed = parse_epoch(raw);
        break;
      case TimestampFormat::DateTime:
        parsed = parse_datetime(raw);
        break;
      case TimestampFormat::Iso8601:
        parsed = parse_iso(raw);
        break;
    }
    if (parsed) return parsed;
  }
  return std::nullopt;
}

std::optional<Instant> parse_timestamp(std::int64_t epoch_seconds,
                                       const TimestampOptions& options) {
  for (auto format : options.priority) {
    if (format == TimestampFormat::EpochSeconds) return Instant{seconds{epoch_seconds}};
  }
  return std::nullopt;
}

std::optional<Instant> parse_timestamp_value(const nlohmann::json& raw,
                                       const TimestampOptions& options) {
  if (raw.is_number_integer()) return parse_timestamp(raw.get<std::int64_t>(), options);
  if (raw.is_string()) return parse_timestamp(raw.get_ref<const std::string&>(), options);
  return std::nullopt;
}

std::optional<TimestampFormat> timestamp_format_from_name(std::string_view name) {
  if (name == "epoch") return TimestampFormat::EpochSeconds;
  if (name == "datetime") return TimestampFormat::DateTime;
  if (name == "iso8601") return TimestampFormat::Iso8601;
  return std::nullopt;
}

std::string format_iso8601(Instant t) {
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss tod{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

std::string format_date(Date d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10) return std::nullopt;
  return read_date(text);
}

}  // namespace sentiflow

#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sentiflow {

/// A UTC instant at one-second resolution.
using Instant = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

enum class TimestampFormat {
  EpochSeconds,  ///< JSON integer or all-digit text
  DateTime,      ///< "YYYY-MM-DD HH:MM" or "YYYY-MM-DD HH:MM:SS", taken as UTC
  Iso8601,       ///< "YYYY-MM-DD[THH:MM[:SS[.fff]]][Z|+HH:MM|-HH:MM|+HHMM]"
};

struct TimestampOptions {
  /// Formats tried in order; formats missing from the list are rejected.
  std::vector<TimestampFormat> priority = {TimestampFormat::EpochSeconds,
                                           TimestampFormat::DateTime,
                                           TimestampFormat::Iso8601};
};

std::optional<Instant> parse_timestamp(std::string_view raw, const TimestampOptions& options = {});
std::optional<Instant> parse_timestamp(std::int64_t epoch_seconds,
                                             const TimestampOptions& options = {});
/// Accepts a JSON string or integer; anything else yields nullopt.
std::optional<Instant> parse_timestamp_value(const nlohmann::json& raw,
                                             const TimestampOptions& options = {});

std::optional<TimestampFormat> timestamp_format_from_name(std::string_view name);

/// "2020-01-23T10:40:00Z"
std::string format_iso8601(Instant t);
/// "2020-01-23"
std::string format_date(Date d);
/// Strict "YYYY-MM-DD".
std::optional<Date> parse_date(std::string_view text);

}  // namespace sentiflow

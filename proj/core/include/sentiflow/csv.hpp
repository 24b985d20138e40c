#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sentiflow::csv {

/// Quote a field per RFC 4180 when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

/// Write one record terminated by CRLF-free "\n".
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Incremental RFC 4180 reader. Quoted fields may span lines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws sentiflow::Error on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number where the most recently returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

/// Format a double with fixed precision, no locale.
std::string format_fixed(double value, int precision);

}  // namespace sentiflow::csv

#pragma once

#include <string>
#include <string_view>

namespace sentiflow {

/// Canonical form used for duplicate detection: every character with the
/// Unicode White_Space property is removed (ASCII space, tab, CR/LF, U+3000
/// ideographic space, NBSP, ...) and the remainder is NFC-composed.
/// Ill-formed UTF-8 sequences become U+FFFD. Idempotent.
std::string normalize_content(std::string_view text);

/// True for code points with the Unicode White_Space property.
bool is_unicode_whitespace(char32_t cp);

/// Strip leading and trailing Unicode whitespace.
std::string_view trim_unicode(std::string_view text);

}  // namespace sentiflow

#include "sentiflow/normalize.hpp"

#include <unicode/bytestream.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "sentiflow/error.hpp"

namespace sentiflow {
namespace {

const icu::Normalizer2& nfc() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(std::string("ICU NFC unavailable: ") + u_errorName(status));
    return n;
  }();
  return *instance;
}

void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(reinterpret_cast<uint8_t*>(buf), len, cp);
  out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

bool is_unicode_whitespace(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }

std::string normalize_content(std::string_view text) {
  // Pass 1: drop whitespace, repair ill-formed sequences.
  std::string stripped;
  stripped.reserve(text.size());
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  bool ascii_only = true;
  for (int32_t i = 0; i < length;) {
    int32_t start = i;
    UChar32 cp;
    U8_NEXT(bytes, i, length, cp);
    if (cp < 0) {
      append_utf8(stripped, 0xFFFD);
      ascii_only = false;
      continue;
    }
    if (u_isUWhiteSpace(cp)) continue;
    if (cp >= 0x80) ascii_only = false;
    stripped.append(text.data() + start, static_cast<std::size_t>(i - start));
  }
  if (ascii_only) return stripped;

  // Pass 2: canonical composition. Whitespace removal can bring a base and a
  // combining mark together, so composition must come second.
  UErrorCode status = U_ZERO_ERROR;
  if (nfc().isNormalizedUTF8(stripped, status) && U_SUCCESS(status)) return stripped;
  status = U_ZERO_ERROR;
  std::string composed;
  composed.reserve(stripped.size());
  icu::StringByteSink<std::string> sink(&composed);
  nfc().normalizeUTF8(0, stripped, sink, nullptr, status);
  if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));
  return composed;
}

std::string_view trim_unicode(std::string_view text) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  auto length = static_cast<int32_t>(text.size());
  int32_t begin = 0;
  while (begin < length) {
    int32_t next = begin;
    UChar32 cp;
    U8_NEXT(bytes, next, length, cp);
    if (cp < 0 || !u_isUWhiteSpace(cp)) break;
    begin = next;
  }
  int32_t end = length;
  while (end > begin) {
    int32_t prev = end;
    UChar32 cp;
    U8_PREV(bytes, begin, prev, cp);
    if (cp < 0 || !u_isUWhiteSpace(cp)) break;
    end = prev;
  }
  return text.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
}

}  // namespace sentiflow

#pragma once

// Word segmentation on Unicode word boundaries (UAX #29, ICU root rules).
// Whitespace segments are dropped; every other segment becomes a token, so
// punctuation comes out as single-character tokens ("dog..." -> dog . . .).

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "textdiv/error.hpp"

namespace textdiv {

/// Half-open byte range [begin, end) of a token inside its source text.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

namespace detail {

// UTF-16 copy of a UTF-8 string plus the byte offset of every UTF-16 index.
// Invalid byte sequences decode to U+FFFD one byte at a time so the offset
// table stays exact.
struct Utf16View {
  icu::UnicodeString text;
  std::vector<std::size_t> byte_at;  // size text.length() + 1
};

inline Utf16View to_utf16(std::string_view utf8) {
  Utf16View out;
  out.byte_at.reserve(utf8.size() + 1);
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      c = 0xFFFD;
      i = start + 1;
    }
    out.byte_at.push_back(static_cast<std::size_t>(start));
    if (c > 0xFFFF) out.byte_at.push_back(static_cast<std::size_t>(start));
    out.text.append(c);
  }
  out.byte_at.push_back(utf8.size());
  return out;
}

inline icu::BreakIterator& word_breaker() {
  thread_local std::unique_ptr<icu::BreakIterator> breaker = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status) || !it) {
      throw Error(std::string("cannot create ICU word break iterator: ") +
                  u_errorName(status));
    }
    return it;
  }();
  return *breaker;
}

inline bool all_whitespace(const icu::UnicodeString& text, int32_t begin, int32_t end) {
  for (int32_t i = begin; i < end;) {
    const UChar32 c = text.char32At(i);
    if (!u_isUWhiteSpace(c)) return false;
    i += U16_LENGTH(c);
  }
  return true;
}

}  // namespace detail

/// Byte spans of the tokens of `text`, in order.
inline std::vector<TokenSpan> token_spans(std::string_view text) {
  std::vector<TokenSpan> spans;
  if (text.empty()) return spans;

  const detail::Utf16View view = detail::to_utf16(text);
  icu::BreakIterator& breaker = detail::word_breaker();
  breaker.setText(view.text);

  int32_t begin = breaker.first();
  for (int32_t end = breaker.next(); end != icu::BreakIterator::DONE;
       begin = end, end = breaker.next()) {
    if (detail::all_whitespace(view.text, begin, end)) continue;
    spans.push_back({view.byte_at[static_cast<std::size_t>(begin)],
                     view.byte_at[static_cast<std::size_t>(end)]});
  }
  return spans;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  for (const TokenSpan& span : token_spans(text)) {
    tokens.emplace_back(text.substr(span.begin, span.end - span.begin));
  }
  return tokens;
}

/// Locale-independent Unicode lowercasing.
inline std::string to_lower(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

/// True when `text` is well-formed UTF-8.
inline bool is_valid_utf8(std::string_view text) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  for (int32_t i = 0; i < length;) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

/// Number of code points in `text[0, byte_offset)`.
inline std::size_t code_point_offset(std::string_view text, std::size_t byte_offset) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < byte_offset && i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++count;
  }
  return count;
}

}  // namespace textdiv

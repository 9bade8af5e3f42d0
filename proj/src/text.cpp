#include "faqir/text.hpp"

#include <array>

namespace faqir::text {

namespace {

// Base letters for U+00C0..U+00FF and U+0100..U+017F; '.' means no folding.
constexpr std::string_view kLatin1Fold =
    "AAAAAA.CEEEEIIII.NOOOOO.OUUUUY.."
    "aaaaaa.ceeeeiiii.nooooo.ouuuuy.y";
constexpr std::string_view kLatinExtAFold =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIi..JjKk.LlLlLlLlLl"
    "NnNnNn...OoOoOo..RrRrRrSsSsSsSsTtTtTtUuUuUuUuUuUuWwYyYZzZzZz.";

static_assert(kLatin1Fold.size() == 64);
static_assert(kLatinExtAFold.size() == 128);

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

}  // namespace

char32_t decode_next(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kReplacement;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  // Overlong encodings, surrogates and out-of-range values.
  static constexpr std::array<char32_t, 5> kMin = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || in(cp, 0xD800, 0xDFFF)) {
    ++pos;
    return kReplacement;
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::u32string to_u32(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) out.push_back(decode_next(s, pos));
  return out;
}

std::string to_utf8(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t cp : s) append_utf8(out, cp);
  return out;
}

bool is_space(char32_t cp) {
  return cp == ' ' || in(cp, 0x09, 0x0D) || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
         in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
         cp == 0x205F || cp == 0x3000;
}

bool is_combining_mark(char32_t cp) {
  return in(cp, 0x0300, 0x036F) || in(cp, 0x1AB0, 0x1AFF) || in(cp, 0x1DC0, 0x1DFF) ||
         in(cp, 0x20D0, 0x20FF) || in(cp, 0xFE20, 0xFE2F);
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
  }
  if (cp < 0xC0) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
  if (cp == 0xD7 || cp == 0xF7) return false;
  if (cp < 0x0370) return true;  // Latin-1 letters, Latin Extended, IPA, modifiers, marks
  if (cp == 0x037E || cp == 0x0387 || in(cp, 0x0482, 0x0489)) return false;
  if (cp == kReplacement || is_space(cp)) return false;
  // Punctuation, symbol, and emoji blocks; everything else counts as a letter.
  return !(in(cp, 0x2000, 0x2BFF) || in(cp, 0x2E00, 0x2E7F) || in(cp, 0x3000, 0x303F) ||
           in(cp, 0xFE10, 0xFE1F) || in(cp, 0xFE30, 0xFE6F) || in(cp, 0xFF00, 0xFF0F) ||
           in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) ||
           in(cp, 0xFFF0, 0xFFFF) || in(cp, 0x1F000, 0x1FAFF)) ||
         is_combining_mark(cp);
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return in(cp, 'A', 'Z') ? cp + 0x20 : cp;
  if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
  if (in(cp, 0x0100, 0x017F)) {
    if (cp == 0x0130) return 'i';
    if (cp == 0x0178) return 0xFF;
    if (in(cp, 0x0100, 0x012F) || in(cp, 0x0132, 0x0137) || in(cp, 0x014A, 0x0177))
      return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x0139, 0x0148) || in(cp, 0x0179, 0x017E)) return (cp % 2 == 1) ? cp + 1 : cp;
    return cp;
  }
  if (cp == 0x0386) return 0x03AC;
  if (in(cp, 0x0388, 0x038A)) return cp + 0x25;
  if (cp == 0x038C) return 0x03CC;
  if (in(cp, 0x038E, 0x038F)) return cp + 0x3F;
  if (in(cp, 0x0391, 0x03A9) && cp != 0x03A2) return cp + 0x20;
  if (in(cp, 0x0400, 0x040F)) return cp + 0x50;
  if (in(cp, 0x0410, 0x042F)) return cp + 0x20;
  return cp;
}

char32_t to_upper(char32_t cp) {
  if (cp < 0x80) return in(cp, 'a', 'z') ? cp - 0x20 : cp;
  if (in(cp, 0xE0, 0xFE) && cp != 0xF7) return cp - 0x20;
  if (cp == 0xFF) return 0x0178;
  if (in(cp, 0x0100, 0x017F)) {
    if (in(cp, 0x0100, 0x012F) || in(cp, 0x0132, 0x0137) || in(cp, 0x014A, 0x0177))
      return (cp % 2 == 1) ? cp - 1 : cp;
    if (in(cp, 0x0139, 0x0148) || in(cp, 0x0179, 0x017E)) return (cp % 2 == 0) ? cp - 1 : cp;
    return cp;
  }
  if (cp == 0x03AC) return 0x0386;
  if (in(cp, 0x03AD, 0x03AF)) return cp - 0x25;
  if (cp == 0x03CC) return 0x038C;
  if (in(cp, 0x03CD, 0x03CE)) return cp - 0x3F;
  if (in(cp, 0x03B1, 0x03C9) && cp != 0x03C2) return cp - 0x20;
  if (in(cp, 0x0430, 0x044F)) return cp - 0x20;
  if (in(cp, 0x0450, 0x045F)) return cp - 0x50;
  return cp;
}

bool is_upper(char32_t cp) { return to_lower(cp) != cp; }

char32_t strip_diacritic(char32_t cp) {
  if (is_combining_mark(cp)) return 0;
  char fold = '.';
  if (in(cp, 0xC0, 0xFF)) {
    fold = kLatin1Fold[cp - 0xC0];
  } else if (in(cp, 0x0100, 0x017F)) {
    fold = kLatinExtAFold[cp - 0x0100];
  }
  return fold == '.' ? cp : static_cast<char32_t>(fold);
}

std::string lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) append_utf8(out, to_lower(decode_next(s, pos)));
  return out;
}

std::string upper(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) append_utf8(out, to_upper(decode_next(s, pos)));
  return out;
}

std::string strip_diacritics(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    const char32_t cp = strip_diacritic(decode_next(s, pos));
    if (cp != 0) append_utf8(out, cp);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  // ASCII whitespace only; bytes >= 0x80 may be UTF-8 continuation bytes.
  const auto ascii_space = [](char c) {
    return c == ' ' || (c >= '\t' && c <= '\r');
  };
  while (begin < end && ascii_space(s[begin])) ++begin;
  while (end > begin && ascii_space(s[end - 1])) --end;
  return s.substr(begin, end - begin);
}

std::string casefold(std::string_view s) { return lower(trim(s)); }

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  while (pos < s.size()) {
    const std::size_t at = pos;
    const char32_t cp = decode_next(s, pos);
    if (is_space(cp)) {
      if (start != std::string_view::npos) {
        words.push_back(s.substr(start, at - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = at;
    }
  }
  if (start != std::string_view::npos) words.push_back(s.substr(start));
  return words;
}

}  // namespace faqir::text

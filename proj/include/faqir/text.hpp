#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 utilities. Covers Latin, Greek and Cyrillic case mapping and
// Latin diacritic folding, which is what Portuguese FAQ text needs.
namespace faqir::text {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `pos` and advances `pos`. Invalid
// sequences yield U+FFFD and consume a single byte.
char32_t decode_next(std::string_view s, std::size_t& pos);
void append_utf8(std::string& out, char32_t cp);
std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);

bool is_space(char32_t cp);
bool is_combining_mark(char32_t cp);
// Word characters: letters, digits and combining marks.
bool is_word_char(char32_t cp);

char32_t to_lower(char32_t cp);
char32_t to_upper(char32_t cp);
bool is_upper(char32_t cp);

// Base letter for precomposed Latin letters; combining marks map to 0.
char32_t strip_diacritic(char32_t cp);

std::string lower(std::string_view s);
std::string upper(std::string_view s);
std::string strip_diacritics(std::string_view s);

std::string_view trim(std::string_view s);
// trim + lowercase, used for duplicate detection.
std::string casefold(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);

}  // namespace faqir::text

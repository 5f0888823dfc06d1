#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Everything downstream works on code points so that
// accented Spanish letters count as single characters.
namespace oppscreen::text {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
std::string encode(char32_t cp);

// Simple case folding: ASCII, Latin-1 and Latin Extended-A upper -> lower.
// Accents are preserved.
char32_t fold(char32_t cp);
std::u32string fold(std::u32string_view cps);
std::string fold(std::string_view utf8);

bool is_letter(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);
bool is_emoji(char32_t cp);
// Joiners, variation selectors and skin-tone modifiers that ride along emoji.
bool is_emoji_modifier(char32_t cp);

// Stable lowercase name for an emoji code point ("rocket", "u1f4b1", ...).
std::string emoji_name(char32_t cp);

std::string collapse_whitespace(std::string_view utf8);
std::vector<std::string> split_whitespace(std::string_view utf8);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string trim(std::string_view s);

// Levenshtein distance over code points; returns limit + 1 as soon as the
// distance is known to exceed limit.
std::size_t bounded_levenshtein(std::u32string_view a, std::u32string_view b,
                                std::size_t limit);

}  // namespace oppscreen::text

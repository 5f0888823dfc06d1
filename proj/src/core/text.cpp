#include "core/text.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <unordered_map>

namespace oppscreen::text {

std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    std::size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c >> 4) == 0xE) {
      cp = c & 0x0F;
      len = 3;
    } else if ((c >> 3) == 0x1E) {
      cp = c & 0x07;
      len = 4;
    } else {
      // Stray continuation or invalid lead byte.
      out.push_back(U'�');
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(U'�');
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cc & 0x3F);
    }
    if (!ok) {
      out.push_back(U'�');
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode(char32_t cp) {
  std::string out;
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
  return out;
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) out += encode(cp);
  return out;
}

char32_t fold(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x100 && cp <= 0x17F) {
    // Latin Extended-A alternates upper/lower, with a shifted run in the middle.
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x130 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return cp;
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  return cp;
}

std::u32string fold(std::u32string_view cps) {
  std::u32string out(cps);
  for (auto& cp : out) cp = fold(cp);
  return out;
}

std::string fold(std::string_view s) { return encode(fold(decode(s))); }

bool is_letter(char32_t cp) {
  if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z')) return true;
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0x24F) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x370 && cp <= 0x3FF) return true;  // Greek
  if (cp >= 0x400 && cp <= 0x52F) return true;  // Cyrillic
  return false;
}

bool is_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }

bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
         cp == 0xA0 || cp == 0x2028 || cp == 0x2029 ||
         (cp >= 0x2000 && cp <= 0x200A) || cp == 0x202F || cp == 0x3000;
}

bool is_emoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF && !(cp >= 0x1F3FB && cp <= 0x1F3FF)) ||
         (cp >= 0x2600 && cp <= 0x27BF) || cp == 0x2B06 || cp == 0x2B07 ||
         cp == 0x2B50 || cp == 0x2B55 || cp == 0x2197 || cp == 0x2198 ||
         cp == 0x2196 || cp == 0x2199 || cp == 0x203C || cp == 0x2049;
}

bool is_emoji_modifier(char32_t cp) {
  return cp == 0x200D || cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

std::string emoji_name(char32_t cp) {
  static const std::unordered_map<char32_t, const char*> kNames = {
      {0x1F680, "rocket"},
      {0x1F4C8, "chart_increasing"},
      {0x1F4C9, "chart_decreasing"},
      {0x1F4CA, "bar_chart"},
      {0x1F4B0, "money_bag"},
      {0x1F4B8, "money_with_wings"},
      {0x1F4B5, "dollar_banknote"},
      {0x1F4B6, "euro_banknote"},
      {0x1F911, "money_mouth_face"},
      {0x1F525, "fire"},
      {0x1F44D, "thumbs_up"},
      {0x1F44E, "thumbs_down"},
      {0x1F44F, "clapping_hands"},
      {0x1F4AA, "flexed_biceps"},
      {0x1F64F, "folded_hands"},
      {0x1F600, "grinning_face"},
      {0x1F602, "face_with_tears_of_joy"},
      {0x1F603, "grinning_face_with_big_eyes"},
      {0x1F604, "grinning_face_with_smiling_eyes"},
      {0x1F60A, "smiling_face_with_smiling_eyes"},
      {0x1F60D, "smiling_face_with_heart_eyes"},
      {0x1F60E, "smiling_face_with_sunglasses"},
      {0x1F642, "slightly_smiling_face"},
      {0x1F641, "slightly_frowning_face"},
      {0x2639, "frowning_face"},
      {0x263A, "smiling_face"},
      {0x1F61E, "disappointed_face"},
      {0x1F61F, "worried_face"},
      {0x1F622, "crying_face"},
      {0x1F62D, "loudly_crying_face"},
      {0x1F628, "fearful_face"},
      {0x1F631, "face_screaming_in_fear"},
      {0x1F620, "angry_face"},
      {0x1F621, "pouting_face"},
      {0x1F914, "thinking_face"},
      {0x1F389, "party_popper"},
      {0x1F4A5, "collision"},
      {0x1F480, "skull"},
      {0x1F6A8, "police_car_light"},
      {0x26A0, "warning"},
      {0x2705, "check_mark_button"},
      {0x274C, "cross_mark"},
      {0x2B06, "up_arrow"},
      {0x2B07, "down_arrow"},
      {0x2197, "up_right_arrow"},
      {0x2198, "down_right_arrow"},
      {0x1F53C, "upwards_button"},
      {0x1F53D, "downwards_button"},
      {0x1F7E2, "green_circle"},
      {0x1F534, "red_circle"},
      {0x1F402, "ox"},
      {0x1F43B, "bear"},
      {0x1F3AF, "direct_hit"},
      {0x1F4A1, "light_bulb"},
      {0x1F4A9, "pile_of_poo"},
  };
  if (auto it = kNames.find(cp); it != kNames.end()) return it->second;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%x", static_cast<unsigned>(cp));
  return buf;
}

std::string collapse_whitespace(std::string_view s) {
  const auto cps = decode(s);
  std::u32string out;
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(cp);
  }
  return encode(out);
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  const auto cps = decode(s);
  std::u32string cur;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      if (!cur.empty()) out.push_back(encode(cur));
      cur.clear();
    } else {
      cur.push_back(cp);
    }
  }
  if (!cur.empty()) out.push_back(encode(cur));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

std::size_t bounded_levenshtein(std::u32string_view a, std::u32string_view b,
                                std::size_t limit) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if ((n > m ? n - m : m - n) > limit) return limit + 1;
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[m], limit + 1);
}

}  // namespace oppscreen::text

#include "dhira/artext.hpp"

#include <algorithm>

#include "dhira/errors.hpp"
#include "dhira/textio.hpp"

namespace dhira::artext {

namespace {

struct Cp {
  char32_t value;
  std::size_t byte_start;
  std::size_t byte_len;
};

// Invalid UTF-8 decodes byte-by-byte to U+FFFD; never throws.
std::vector<Cp> decode_with_offsets(std::string_view text) {
  std::vector<Cp> out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < text.size() &&
               (static_cast<unsigned char>(text[i + 1]) >> 6) == 0x2) {
      cp = (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3F);
      len = cp >= 0x80 ? 2 : 1;
      if (len == 1) cp = 0xFFFD;  // overlong
    } else if ((b0 >> 4) == 0xE && i + 2 < text.size() &&
               (static_cast<unsigned char>(text[i + 1]) >> 6) == 0x2 &&
               (static_cast<unsigned char>(text[i + 2]) >> 6) == 0x2) {
      cp = (char32_t(b0 & 0x0F) << 12) |
           (char32_t(static_cast<unsigned char>(text[i + 1]) & 0x3F) << 6) |
           (static_cast<unsigned char>(text[i + 2]) & 0x3F);
      len = cp >= 0x800 ? 3 : 1;
      if (len == 1) cp = 0xFFFD;
    } else if ((b0 >> 3) == 0x1E && i + 3 < text.size() &&
               (static_cast<unsigned char>(text[i + 1]) >> 6) == 0x2 &&
               (static_cast<unsigned char>(text[i + 2]) >> 6) == 0x2 &&
               (static_cast<unsigned char>(text[i + 3]) >> 6) == 0x2) {
      cp = (char32_t(b0 & 0x07) << 18) |
           (char32_t(static_cast<unsigned char>(text[i + 1]) & 0x3F) << 12) |
           (char32_t(static_cast<unsigned char>(text[i + 2]) & 0x3F) << 6) |
           (static_cast<unsigned char>(text[i + 3]) & 0x3F);
      len = (cp >= 0x10000 && cp <= 0x10FFFF) ? 4 : 1;
      if (len == 1) cp = 0xFFFD;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

constexpr char32_t kTatweel = 0x0640;
constexpr char32_t kZwj = 0x200D;

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x0009: case 0x000A: case 0x000B: case 0x000C: case 0x000D:
    case 0x0020: case 0x0085: case 0x00A0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Zero-width/format controls dropped alongside whitespace (ZWJ is handled
// separately inside emoji sequences).
bool is_format_control(char32_t cp) {
  switch (cp) {
    case 0x00AD: case 0x061C: case 0x200B: case 0x200C:
    case 0x200E: case 0x200F: case 0x2060: case 0xFEFF:
      return true;
    default:
      return false;
  }
}

bool is_latin_letter(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
         (cp >= 0x00C0 && cp <= 0x00D6) || (cp >= 0x00D8 && cp <= 0x00F6) ||
         (cp >= 0x00F8 && cp <= 0x024F);
}

bool is_emoji_modifier(char32_t cp) {
  return cp == 0xFE0F || cp == 0x20E3 || (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

bool is_ascii_word(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') ||
         (cp >= '0' && cp <= '9') || cp == '_';
}

bool is_hashtag_body(char32_t cp) {
  return is_arabic_letter(cp) || is_arabic_diacritic(cp) || cp == kTatweel ||
         is_latin_letter(cp) || is_digit_cp(cp) || cp == '_';
}

bool matches_ascii_prefix(const std::vector<Cp>& cps, std::size_t pos, std::string_view prefix) {
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (pos + k >= cps.size()) return false;
    char32_t cp = cps[pos + k].value;
    if (cp >= 'A' && cp <= 'Z') cp += 32;
    if (cp != static_cast<char32_t>(prefix[k])) return false;
  }
  return true;
}

bool is_url_start(const std::vector<Cp>& cps, std::size_t pos) {
  return matches_ascii_prefix(cps, pos, "http://") || matches_ascii_prefix(cps, pos, "https://") ||
         matches_ascii_prefix(cps, pos, "www.") || matches_ascii_prefix(cps, pos, "t.co/");
}

char32_t normalize_letter(char32_t cp) {
  switch (cp) {
    case 0x0622: case 0x0623: case 0x0625: case 0x0671: return 0x0627;  // -> alef
    case 0x0624: return 0x0648;                                         // -> waw
    case 0x0626: case 0x0649: return 0x064A;                            // -> ya
    case 0x0629: return 0x0647;                                         // -> ha
    default: return cp;
  }
}

}  // namespace

bool is_arabic_letter(char32_t cp) {
  return (cp >= 0x0620 && cp <= 0x064A && cp != kTatweel) || cp == 0x066E || cp == 0x066F ||
         (cp >= 0x0671 && cp <= 0x06D3) || cp == 0x06D5 || cp == 0x06EE || cp == 0x06EF ||
         (cp >= 0x06FA && cp <= 0x06FC) || cp == 0x06FF || (cp >= 0x0750 && cp <= 0x077F);
}

bool is_arabic_diacritic(char32_t cp) {
  return (cp >= 0x0610 && cp <= 0x061A) || (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 ||
         (cp >= 0x06D6 && cp <= 0x06DC) || (cp >= 0x06DF && cp <= 0x06E4) || cp == 0x06E7 ||
         cp == 0x06E8 || (cp >= 0x06EA && cp <= 0x06ED);
}

bool is_digit_cp(char32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 0x0660 && cp <= 0x0669) ||
         (cp >= 0x06F0 && cp <= 0x06F9);
}

bool is_emoji_cp(char32_t cp) {
  if (cp >= 0x1F300 && cp <= 0x1F64F) return true;
  if (cp >= 0x1F680 && cp <= 0x1F6FF) return true;
  if (cp >= 0x1F900 && cp <= 0x1F9FF) return true;
  if (cp >= 0x1FA70 && cp <= 0x1FAFF) return true;
  if (cp >= 0x2600 && cp <= 0x27BF) return true;
  if (cp >= 0x1F1E6 && cp <= 0x1F1FF) return true;  // regional indicators
  switch (cp) {
    case 0x231A: case 0x231B: case 0x2B50: case 0x2B55:
    case 0x2B05: case 0x2B06: case 0x2B07: case 0x2B1B: case 0x2B1C:
    case 0x2934: case 0x2935: case 0x25B6: case 0x25C0:
    case 0x25AA: case 0x25AB:
      return true;
    default:
      return (cp >= 0x23E9 && cp <= 0x23F3) || (cp >= 0x23F8 && cp <= 0x23FA) ||
             (cp >= 0x25FB && cp <= 0x25FE);
  }
}

bool is_punctuation_cp(char32_t cp) {
  static constexpr std::string_view ascii = "!\"#%&'()*,-./:;?@[\\]_{}";
  if (cp < 0x80) return ascii.find(static_cast<char>(cp)) != std::string_view::npos;
  switch (cp) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7:
    case 0x00BB: case 0x00BF: case 0x060C: case 0x060D: case 0x061B:
    case 0x061E: case 0x061F: case 0x06D4:
      return true;
    default:
      return (cp >= 0x066A && cp <= 0x066D) || (cp >= 0x2010 && cp <= 0x2027) ||
             (cp >= 0x2030 && cp <= 0x205E);
  }
}

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  for (const Cp& c : decode_with_offsets(text)) out.push_back(c.value);
  return out;
}

std::string encode_utf8(char32_t cp) {
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

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) out += encode_utf8(cp);
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  const std::vector<Cp> cps = decode_with_offsets(text);
  std::vector<Token> tokens;

  const auto slice = [&](std::size_t first, std::size_t last_exclusive) {
    const std::size_t b0 = cps[first].byte_start;
    const Cp& last = cps[last_exclusive - 1];
    return std::string(text.substr(b0, last.byte_start + last.byte_len - b0));
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i].value;
    if (is_whitespace(cp) || is_format_control(cp) || cp == kZwj) {
      ++i;
      continue;
    }
    const std::size_t start = i;

    if (is_url_start(cps, i)) {
      while (i < cps.size() && !is_whitespace(cps[i].value) && !is_format_control(cps[i].value)) {
        ++i;
      }
      tokens.push_back({slice(start, i), TokenClass::url});
      continue;
    }
    if (cp == '#' && i + 1 < cps.size() && is_hashtag_body(cps[i + 1].value)) {
      ++i;
      while (i < cps.size() && is_hashtag_body(cps[i].value)) ++i;
      tokens.push_back({slice(start, i), TokenClass::hashtag});
      continue;
    }
    if (cp == '@' && i + 1 < cps.size() && is_ascii_word(cps[i + 1].value)) {
      ++i;
      while (i < cps.size() && is_ascii_word(cps[i].value)) ++i;
      tokens.push_back({slice(start, i), TokenClass::mention});
      continue;
    }
    if (is_emoji_cp(cp)) {
      ++i;
      for (;;) {
        if (i < cps.size() && is_emoji_modifier(cps[i].value)) {
          ++i;
        } else if (i + 1 < cps.size() && cps[i].value == kZwj && is_emoji_cp(cps[i + 1].value)) {
          i += 2;
        } else {
          break;
        }
      }
      tokens.push_back({slice(start, i), TokenClass::emoji});
      continue;
    }
    if (is_digit_cp(cp)) {
      while (i < cps.size() && is_digit_cp(cps[i].value)) ++i;
      tokens.push_back({slice(start, i), TokenClass::numeric});
      continue;
    }
    if (is_arabic_letter(cp)) {
      while (i < cps.size() && (is_arabic_letter(cps[i].value) ||
                                is_arabic_diacritic(cps[i].value) || cps[i].value == kTatweel)) {
        ++i;
      }
      tokens.push_back({slice(start, i), TokenClass::arabic_word});
      continue;
    }
    if (is_latin_letter(cp)) {
      while (i < cps.size() && is_latin_letter(cps[i].value)) ++i;
      tokens.push_back({slice(start, i), TokenClass::latin_word});
      continue;
    }
    if (is_punctuation_cp(cp)) {
      ++i;
      tokens.push_back({slice(start, i), TokenClass::punctuation});
      continue;
    }
    // Maximal run of characters that fit no other class.
    while (i < cps.size()) {
      const char32_t c = cps[i].value;
      if (is_whitespace(c) || is_format_control(c) || c == kZwj || is_emoji_cp(c) ||
          is_digit_cp(c) || is_arabic_letter(c) || is_latin_letter(c) || is_punctuation_cp(c) ||
          c == '#' || c == '@' || is_url_start(cps, i)) {
        break;
      }
      ++i;
    }
    tokens.push_back({slice(start, i), TokenClass::other});
  }
  return tokens;
}

std::string normalize_word(std::string_view word) {
  const std::vector<char32_t> cps = decode_utf8(word);
  std::vector<char32_t> kept;
  kept.reserve(cps.size());
  for (char32_t cp : cps) {
    if (is_arabic_diacritic(cp) || cp == kTatweel) continue;
    kept.push_back(cp);
  }
  // Collapse runs of >=3 identical letters to a single occurrence.
  std::vector<char32_t> collapsed;
  std::size_t i = 0;
  while (i < kept.size()) {
    std::size_t j = i;
    while (j + 1 < kept.size() && kept[j + 1] == kept[i]) ++j;
    const std::size_t run = j - i + 1;
    const bool letter = is_arabic_letter(kept[i]) || is_latin_letter(kept[i]);
    const std::size_t emit = (letter && run >= 3) ? 1 : run;
    for (std::size_t k = 0; k < emit; ++k) collapsed.push_back(kept[i]);
    i = j + 1;
  }
  for (char32_t& cp : collapsed) cp = normalize_letter(cp);
  return encode_utf8(collapsed);
}

std::vector<std::string> normalize_for_topics(std::string_view text, const StopwordSet& stopwords) {
  std::vector<std::string> out;
  for (const Token& tok : tokenize(text)) {
    std::string content;
    switch (tok.cls) {
      case TokenClass::url:
      case TokenClass::mention:
      case TokenClass::emoji:
      case TokenClass::punctuation:
      case TokenClass::numeric:
        continue;
      case TokenClass::hashtag: {
        content = tok.surface.substr(1);  // strip '#'
        std::replace(content.begin(), content.end(), '_', ' ');
        break;
      }
      default:
        content = tok.surface;
        break;
    }
    // Normalize letters, then keep only Arabic letters; everything else
    // acts as a word separator so unrelated fragments are not glued.
    const std::string normalized = normalize_word(content);
    std::vector<char32_t> word;
    const auto flush = [&]() {
      if (word.empty()) return;
      if (word.size() > 2) {
        std::string w = encode_utf8(word);
        if (!stopwords.contains(w)) out.push_back(std::move(w));
      }
      word.clear();
    };
    for (char32_t cp : decode_utf8(normalized)) {
      if (is_arabic_letter(cp)) {
        word.push_back(cp);
      } else {
        flush();
      }
    }
    flush();
  }
  return out;
}

std::size_t count_elongations(std::string_view text) {
  std::size_t count = 0;
  for (const Token& tok : tokenize(text)) {
    if (tok.cls != TokenClass::arabic_word && tok.cls != TokenClass::latin_word) continue;
    const std::vector<char32_t> cps = decode_utf8(tok.surface);
    std::size_t i = 0;
    while (i < cps.size()) {
      std::size_t j = i;
      while (j + 1 < cps.size() && cps[j + 1] == cps[i]) ++j;
      const bool letter = is_arabic_letter(cps[i]) || is_latin_letter(cps[i]);
      if (letter && j - i + 1 >= 3) ++count;
      i = j + 1;
    }
  }
  return count;
}

TokenizedTweet analyze(std::string_view text, const StopwordSet& stopwords) {
  TokenizedTweet result;
  result.tokens = tokenize(text);
  result.normalized_tokens = normalize_for_topics(text, stopwords);
  return result;
}

StopwordSet load_stopwords(const std::string& path) {
  const std::string content = read_file(path);
  StopwordSet set;
  for (const std::string& raw : split(content, '\n')) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    set.insert(normalize_word(line));
  }
  return set;
}

}  // namespace dhira::artext

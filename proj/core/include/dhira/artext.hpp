#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace dhira::artext {

enum class TokenClass {
  arabic_word,
  latin_word,
  numeric,
  emoji,
  punctuation,
  hashtag,
  mention,
  url,
  other,
};

struct Token {
  std::string surface;
  TokenClass cls;
};

struct TokenizedTweet {
  std::vector<Token> tokens;
  std::vector<std::string> normalized_tokens;
};

using StopwordSet = std::unordered_set<std::string>;

// Codepoint predicates. The tables are documented pragmatic subsets of the
// relevant Unicode properties; see artext.cpp.
bool is_arabic_letter(char32_t cp);
bool is_arabic_diacritic(char32_t cp);
bool is_digit_cp(char32_t cp);
bool is_emoji_cp(char32_t cp);
bool is_punctuation_cp(char32_t cp);

// Decodes UTF-8; invalid bytes decode to U+FFFD one byte at a time so the
// function is total.
std::vector<char32_t> decode_utf8(std::string_view text);
std::string encode_utf8(const std::vector<char32_t>& cps);
std::string encode_utf8(char32_t cp);

// Rule-based classification. Every non-whitespace, non-format character of
// the input lands in exactly one token.
std::vector<Token> tokenize(std::string_view text);

// Full tokenization plus the topic-pipeline normalization of the same text.
TokenizedTweet analyze(std::string_view text, const StopwordSet& stopwords);

// Topic-model preprocessing. Applies, in order: URL/mention removal,
// diacritic strip, tatweel strip, elongation collapse (>=3 identical
// consecutive letters -> 1), letter normalization (alef variants -> bare
// alef, alef maqsura -> ya, ta marbuta -> ha, hamza seats unified), hashtag
// unwrap (#/underscores), non-Arabic character removal, stopword removal,
// and drops words of length <= 2. Idempotent.
std::vector<std::string> normalize_for_topics(std::string_view text, const StopwordSet& stopwords);

// Letter-level normalization of a single word (diacritic/tatweel strip,
// elongation collapse, letter unification). Used for lexicon matching.
std::string normalize_word(std::string_view word);

// Number of maximal runs of >=3 identical letters inside word tokens.
std::size_t count_elongations(std::string_view text);

// Loads a newline-delimited stopword file ('#' comments allowed); words are
// stored letter-normalized. Throws DataError if unreadable.
StopwordSet load_stopwords(const std::string& path);

// Built-in Modern Standard Arabic stopword list (~200 entries).
const StopwordSet& default_stopwords();

}  // namespace dhira::artext

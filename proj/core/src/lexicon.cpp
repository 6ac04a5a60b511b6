#include <cstdlib>

#include "dhira/artext.hpp"
#include "dhira/errors.hpp"
#include "dhira/features.hpp"
#include "dhira/textio.hpp"

namespace dhira::features {

namespace {

struct LexEntry {
  const char* word;
  double polarity;
  bool subjective;
  bool negator;
};

// Small default lexicon; tests and the synthetic pipeline rely on its
// presence, real analyses should load a domain lexicon instead.
constexpr LexEntry kDefaultEntries[] = {
    {"جميل", 0.8, true, false},   {"رائع", 0.9, true, false},   {"حب", 0.7, true, false},
    {"سعيد", 0.8, true, false},   {"ممتاز", 0.9, true, false},  {"نجاح", 0.6, true, false},
    {"خير", 0.5, true, false},    {"فرح", 0.7, true, false},    {"حلو", 0.6, true, false},
    {"شكرا", 0.5, true, false},   {"مبروك", 0.7, true, false},  {"بطل", 0.5, true, false},
    {"قبيح", -0.7, true, false},  {"كره", -0.8, true, false},   {"حرب", -0.5, false, false},
    {"موت", -0.7, false, false},  {"حزين", -0.7, true, false},  {"فشل", -0.6, true, false},
    {"سيء", -0.7, true, false},   {"غضب", -0.6, true, false},   {"خسارة", -0.5, true, false},
    {"عدوان", -0.6, false, false}, {"ظلم", -0.7, true, false},  {"كارثة", -0.8, true, false},
    {"لا", 0.0, false, true},     {"لم", 0.0, false, true},     {"لن", 0.0, false, true},
    {"ما", 0.0, false, true},     {"ليس", 0.0, false, true},    {"غير", 0.0, false, true},
    {"بدون", 0.0, false, true},
};

}  // namespace

SentimentLexicon load_lexicon(const std::string& path) {
  const std::string content = read_file(path);
  SentimentLexicon lex;
  std::size_t line_no = 0;
  for (const std::string& raw : split(content, '\n')) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string> cols = split(line, '\t');
    if (cols.size() != 4) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": expected 4 tab-separated columns");
    }
    const std::string word = artext::normalize_word(trim(cols[0]));
    char* end = nullptr;
    const double polarity = std::strtod(cols[1].c_str(), &end);
    if (end == cols[1].c_str() || polarity < -1.0 || polarity > 1.0) {
      throw DataError("lexicon line " + std::to_string(line_no) + ": polarity outside [-1,1]");
    }
    if (polarity != 0.0) lex.polarity[word] = polarity;
    if (trim(cols[2]) == "1") lex.subjective.insert(word);
    if (trim(cols[3]) == "1") lex.negators.insert(word);
  }
  return lex;
}

const SentimentLexicon& default_lexicon() {
  static const SentimentLexicon lex = []() {
    SentimentLexicon l;
    for (const LexEntry& e : kDefaultEntries) {
      const std::string w = artext::normalize_word(e.word);
      if (e.polarity != 0.0) l.polarity[w] = e.polarity;
      if (e.subjective) l.subjective.insert(w);
      if (e.negator) l.negators.insert(w);
    }
    return l;
  }();
  return lex;
}

}  // namespace dhira::features

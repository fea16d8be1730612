#include "sner/preprocess.hpp"

#include "sner/error.hpp"
#include "sner/utf8.hpp"

namespace sner {

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig config;
  for (char32_t d = 0; d < 10; ++d) config.digit_map[d] = 0x660 + d;
  for (char32_t c = 0; c < 0x20; ++c) {
    if (!utf8::is_whitespace(c)) config.unwanted_chars.insert(c);
  }
  config.unwanted_chars.insert(0x7F);
  for (char32_t c = 0x80; c < 0xA0; ++c) {
    if (!utf8::is_whitespace(c)) config.unwanted_chars.insert(c);
  }
  for (char32_t c = 0x200B; c <= 0x200D; ++c) config.unwanted_chars.insert(c);
  for (char32_t c = 0x21; c < 0x7F; ++c) {
    const bool punct = !(c >= U'0' && c <= U'9') && !utf8::is_latin_letter(c);
    if (punct && !is_sentence_delimiter(c)) config.unwanted_chars.insert(c);
  }
  return config;
}

PreprocessConfig PreprocessConfig::extended_digits() {
  PreprocessConfig config = defaults();
  for (char32_t d = 0; d < 10; ++d) config.digit_map[d] = 0x6F0 + d;
  return config;
}

void PreprocessConfig::validate() const {
  const std::set<char32_t> targets(digit_map.begin(), digit_map.end());
  if (targets.size() != digit_map.size()) throw UsageError("digit map is not injective");
}

bool is_sentence_delimiter(char32_t c) {
  return c == U'.' || c == 0x61F || c == U'!' || c == U'?';
}

namespace {

std::u32string normalize_spaces(const std::u32string& in) {
  std::u32string out;
  out.reserve(in.size());
  bool pending_space = false;
  for (char32_t c : in) {
    if (utf8::is_whitespace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string trimmed(const std::u32string& text) { return utf8::encode(normalize_spaces(text)); }

}  // namespace

std::string clean_text(std::string_view raw, const PreprocessConfig& config) {
  const std::u32string in = utf8::decode(raw);
  std::u32string kept;
  kept.reserve(in.size());
  for (char32_t c : in) {
    if (!config.unwanted_chars.contains(c)) kept.push_back(c);
  }
  if (config.strip_latin) {
    std::u32string no_latin;
    no_latin.reserve(kept.size());
    for (char32_t c : kept) {
      if (!utf8::is_latin_letter(c)) no_latin.push_back(c);
    }
    kept = std::move(no_latin);
  }
  return trimmed(kept);
}

std::string convert_digits(std::string_view text, const PreprocessConfig& config) {
  std::u32string cps = utf8::decode(text);
  for (char32_t& c : cps) {
    if (c >= U'0' && c <= U'9') c = config.digit_map[c - U'0'];
  }
  return utf8::encode(cps);
}

std::vector<std::string> tokenize_sentences(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::vector<std::string> out;
  std::u32string current;
  const auto flush = [&] {
    std::string s = trimmed(current);
    if (!s.empty()) out.push_back(std::move(s));
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    current.push_back(c);
    if (!is_sentence_delimiter(c)) continue;
    // a decimal point between digits does not end a sentence
    if (c == U'.' && i > 0 && i + 1 < cps.size() && utf8::is_digit(cps[i - 1]) &&
        utf8::is_digit(cps[i + 1])) {
      continue;
    }
    while (i + 1 < cps.size() && is_sentence_delimiter(cps[i + 1])) current.push_back(cps[++i]);
    flush();
  }
  flush();
  return out;
}

std::vector<std::string> tokenize_words(std::string_view sentence) {
  const std::u32string cps = utf8::decode(sentence);
  std::vector<std::u32string> words;
  std::u32string current;
  for (char32_t c : cps) {
    if (utf8::is_whitespace(c)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  if (!words.empty()) {
    std::u32string& last = words.back();
    std::size_t cut = last.size();
    while (cut > 0 && is_sentence_delimiter(last[cut - 1])) --cut;
    if (cut > 0 && cut < last.size()) {
      std::u32string punct = last.substr(cut);
      last.resize(cut);
      words.push_back(std::move(punct));
    }
  }

  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(utf8::encode(w));
  return out;
}

std::vector<std::vector<std::string>> preprocess(std::string_view raw,
                                                 const PreprocessConfig& config) {
  config.validate();
  const std::string text = convert_digits(clean_text(raw, config), config);
  std::vector<std::vector<std::string>> out;
  for (const auto& sentence : tokenize_sentences(text)) {
    auto words = tokenize_words(sentence);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

Corpus preprocess_to_skeleton(std::string_view raw, const PreprocessConfig& config) {
  Corpus corpus;
  for (auto& words : preprocess(raw, config)) {
    Sentence sentence;
    for (auto& w : words) sentence.tokens.push_back(Token{std::move(w), Label::outside()});
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace sner

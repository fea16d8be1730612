#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sner/corpus.hpp"

namespace sner {

struct PreprocessConfig {
  // Target glyph for each ASCII digit '0'..'9'. Must be injective.
  std::array<char32_t, 10> digit_map{};
  bool strip_latin = true;
  std::set<char32_t> unwanted_chars;

  // Arabic-Indic digits U+0660..U+0669; unwanted = non-whitespace control
  // characters, U+200B..U+200D, ASCII punctuation other than . ! ?
  static PreprocessConfig defaults();
  // Same as defaults() but mapping to Extended Arabic-Indic U+06F0..U+06F9.
  static PreprocessConfig extended_digits();

  // Throws UsageError when digit_map is not injective.
  void validate() const;
};

bool is_sentence_delimiter(char32_t c);  // . ؟ ! ?

std::string clean_text(std::string_view raw, const PreprocessConfig& config);
std::string convert_digits(std::string_view text, const PreprocessConfig& config);
std::vector<std::string> tokenize_sentences(std::string_view text);
std::vector<std::string> tokenize_words(std::string_view sentence);

// clean -> convert digits -> sentence split -> word split.
std::vector<std::vector<std::string>> preprocess(std::string_view raw,
                                                 const PreprocessConfig& config);

// Same pipeline, emitted as a corpus with every tag O.
Corpus preprocess_to_skeleton(std::string_view raw, const PreprocessConfig& config);

}  // namespace sner

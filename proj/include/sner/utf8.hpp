#pragma once

#include <string>
#include <string_view>

namespace sner::utf8 {

// Decodes UTF-8 into code points. Throws DataError on invalid sequences.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

// Number of code points; input must be valid UTF-8.
std::size_t length(std::string_view text);

bool is_whitespace(char32_t c);
bool is_latin_letter(char32_t c);        // [A-Za-z]
bool is_latin_upper(char32_t c);         // Latin script uppercase, incl. Latin-1/Ext-A
bool is_latin_lower(char32_t c);
bool is_digit(char32_t c);               // ASCII, Arabic-Indic, Extended Arabic-Indic
bool is_arabic_letter(char32_t c);       // Arabic-script letters used by Sorani
bool is_letter(char32_t c);

// Simple case folding for Latin, Greek and Cyrillic; other scripts are
// case-invariant and pass through.
char32_t fold_case(char32_t c);
std::string fold_case(std::string_view text);

}  // namespace sner::utf8

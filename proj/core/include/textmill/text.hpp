#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace textmill {

// Trims and collapses every run of ASCII whitespace to a single space.
std::string collapse_whitespace(std::string_view text);

// Unicode NFC via ICU. Invalid UTF-8 bytes pass through U+FFFD substitution.
std::string nfc_normalize(std::string_view utf8);

// Canonical form hashed into a document id: NFC, then whitespace-collapsed.
std::string normalize_for_id(std::string_view text);

std::vector<std::string> whitespace_split(std::string_view text);

// Window/shingle units: whitespace tokens, ASCII-lowercased, ASCII punctuation
// stripped; tokens that end up empty are dropped.
std::vector<std::string> normalize_words(std::string_view text);
std::string normalize_word(std::string_view token);

bool is_english_stopword(std::string_view lowercase_word);

// Fraction of all bytes that are ASCII letters. Empty text -> 0.
double ascii_letter_ratio(std::string_view text);

// Fraction of normalized words that are English stopwords. No words -> 0.
double stopword_ratio(std::string_view text);

std::string to_lower_ascii(std::string_view text);

}  // namespace textmill

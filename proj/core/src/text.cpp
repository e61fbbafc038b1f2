#include "textmill/text.hpp"

#include <unicode/errorcode.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cctype>
#include <unordered_set>

namespace textmill {

namespace {

inline bool ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool ascii_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline bool ascii_alnum(unsigned char c) {
  return ascii_letter(c) || (c >= '0' && c <= '9');
}

const std::unordered_set<std::string_view>& stopword_set() {
  static const std::unordered_set<std::string_view> words = {
      "a",     "about", "after",  "all",   "also",  "an",    "and",   "any",
      "are",   "as",    "at",     "be",    "been",  "but",   "by",    "can",
      "could", "did",   "do",     "does",  "for",   "from",  "had",   "has",
      "have",  "he",    "her",    "him",   "his",   "how",   "i",     "if",
      "in",    "into",  "is",     "it",    "its",   "just",  "like",  "may",
      "me",    "more",  "most",   "my",    "no",    "not",   "of",    "on",
      "one",   "only",  "or",     "other", "our",   "out",   "over",  "she",
      "so",    "some",  "such",   "than",  "that",  "the",   "their", "them",
      "then",  "there", "these",  "they",  "this",  "those", "to",    "up",
      "was",   "we",    "were",   "what",  "when",  "which", "while", "who",
      "will",  "with",  "would",  "you",   "your"};
  return words;
}

}  // namespace

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // leading whitespace is dropped
  for (unsigned char c : text) {
    if (ascii_space(c)) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      out.push_back(static_cast<char>(c));
      in_space = false;
    }
  }
  return out;
}

std::string nfc_normalize(std::string_view utf8) {
  icu::ErrorCode ec;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(ec);
  if (ec.isFailure()) return std::string(utf8);
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  icu::UnicodeString normalized = nfc->normalize(in, ec);
  if (ec.isFailure()) return std::string(utf8);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string normalize_for_id(std::string_view text) {
  return collapse_whitespace(nfc_normalize(text));
}

std::vector<std::string> whitespace_split(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !ascii_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string normalize_word(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (unsigned char c : token) {
    if (c >= 'A' && c <= 'Z') {
      out.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (ascii_alnum(c) || c >= 0x80) {
      out.push_back(static_cast<char>(c));
    }
    // ASCII punctuation is dropped
  }
  return out;
}

std::vector<std::string> normalize_words(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& token : whitespace_split(text)) {
    std::string w = normalize_word(token);
    if (!w.empty()) out.push_back(std::move(w));
  }
  return out;
}

bool is_english_stopword(std::string_view lowercase_word) {
  return stopword_set().count(lowercase_word) > 0;
}

double ascii_letter_ratio(std::string_view text) {
  if (text.empty()) return 0.0;
  std::size_t letters = 0;
  for (unsigned char c : text) {
    if (ascii_letter(c)) ++letters;
  }
  return static_cast<double>(letters) / static_cast<double>(text.size());
}

double stopword_ratio(std::string_view text) {
  auto words = normalize_words(text);
  if (words.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& w : words) {
    if (is_english_stopword(w)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

std::string to_lower_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace textmill

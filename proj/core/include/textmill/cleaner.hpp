#pragma once

#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "textmill/document.hpp"

namespace textmill {

class Tokenizer;

struct PatternSpec {
  std::string name;
  std::string regex;  // ECMAScript syntax
};

struct CleaningRuleConfig {
  std::vector<PatternSpec> pii_patterns;
  std::vector<PatternSpec> link_patterns;
  int min_tokens = 16;
  std::string terminal_punctuation = ".!?\"')]";
  double english_stopword_ratio_min = 0.05;
  double ascii_letter_ratio_min = 0.6;

  static CleaningRuleConfig defaults();
  void validate() const;  // throws ConfigError
};

struct RejectionRecord {
  std::uint64_t doc_id = 0;  // id of the incoming document
  std::string rule;          // one of kCleanerRules
  std::string detail;
};

// Rejection rule registry; transforms never reject, so only the two
// predicates appear here.
inline constexpr const char* kCleanerRules[] = {"is_english", "is_complete"};

std::string rejection_to_jsonl_line(const RejectionRecord& r);

// Fixed rule order: strip_links -> redact_pii -> is_english -> is_complete.
// Transforms run before predicates so length checks see post-redaction text.
class Cleaner {
 public:
  Cleaner(CleaningRuleConfig cfg, const Tokenizer& tokenizer);

  std::string strip_links(std::string_view text) const;
  std::pair<std::string, int> redact_pii(std::string_view text) const;
  bool is_complete(const Document& doc) const;
  bool is_english(const Document& doc) const;

  // Applies both transforms and refreshes id/token_count.
  Document transform(Document doc) const;
  // First failing predicate for an already-transformed document, if any.
  std::optional<RejectionRecord> evaluate(const Document& doc) const;

  struct Result {
    std::vector<Document> kept;
    std::vector<RejectionRecord> rejections;
  };
  // Order-preserving; every input lands in exactly one of kept/rejections.
  // Rejection records carry the incoming document's id.
  Result clean(std::vector<Document> docs) const;

  const CleaningRuleConfig& config() const { return cfg_; }

 private:
  CleaningRuleConfig cfg_;
  const Tokenizer& tokenizer_;
  std::vector<std::regex> link_res_;
  std::vector<std::regex> pii_res_;
};

inline constexpr const char* kRedactionPlaceholder = "<REDACTED>";

}  // namespace textmill

#include "textmill/cleaner.hpp"

#include <json.hpp>

#include "textmill/error.hpp"
#include "textmill/text.hpp"
#include "textmill/tokenizer.hpp"

namespace textmill {

CleaningRuleConfig CleaningRuleConfig::defaults() {
  CleaningRuleConfig cfg;
  cfg.pii_patterns = {
      {"email", R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})"},
      {"phone", R"((\+?\d{1,3}[-. ]?)?\(?\d{3}\)?[-. ]?\d{3}[-. ]?\d{4}\b)"},
      {"id_number", R"(\b\d{3}-\d{2}-\d{4}\b)"},
  };
  cfg.link_patterns = {
      {"url", R"(https?://[^\s]+)"},
      {"www", R"(\bwww\.[^\s]+)"},
  };
  return cfg;
}

void CleaningRuleConfig::validate() const {
  if (min_tokens < 1) throw ConfigError("cleaning.min_tokens must be >= 1");
  if (english_stopword_ratio_min < 0.0 || english_stopword_ratio_min > 1.0) {
    throw ConfigError("cleaning.english_stopword_ratio_min must be in [0,1]");
  }
  if (ascii_letter_ratio_min < 0.0 || ascii_letter_ratio_min > 1.0) {
    throw ConfigError("cleaning.ascii_letter_ratio_min must be in [0,1]");
  }
  for (const auto& p : pii_patterns) {
    try {
      std::regex re(p.regex);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad pii pattern '" + p.name + "': " + e.what());
    }
  }
  for (const auto& p : link_patterns) {
    try {
      std::regex re(p.regex);
    } catch (const std::regex_error& e) {
      throw ConfigError("bad link pattern '" + p.name + "': " + e.what());
    }
  }
}

std::string rejection_to_jsonl_line(const RejectionRecord& r) {
  nlohmann::ordered_json j;
  j["doc_id"] = r.doc_id;
  j["rule"] = r.rule;
  j["detail"] = r.detail;
  return j.dump();
}

Cleaner::Cleaner(CleaningRuleConfig cfg, const Tokenizer& tokenizer)
    : cfg_(std::move(cfg)), tokenizer_(tokenizer) {
  cfg_.validate();
  for (const auto& p : cfg_.link_patterns) {
    link_res_.emplace_back(p.regex, std::regex::ECMAScript | std::regex::optimize);
  }
  for (const auto& p : cfg_.pii_patterns) {
    pii_res_.emplace_back(p.regex, std::regex::ECMAScript | std::regex::optimize);
  }
}

std::string Cleaner::strip_links(std::string_view text) const {
  std::string out(text);
  for (const auto& re : link_res_) {
    out = std::regex_replace(out, re, "");
  }
  return out;
}

std::pair<std::string, int> Cleaner::redact_pii(std::string_view text) const {
  std::string out(text);
  int count = 0;
  for (const auto& re : pii_res_) {
    std::string next;
    next.reserve(out.size());
    auto begin = std::sregex_iterator(out.begin(), out.end(), re);
    auto end = std::sregex_iterator();
    std::size_t last = 0;
    for (auto it = begin; it != end; ++it) {
      next.append(out, last, static_cast<std::size_t>(it->position()) - last);
      next.append(kRedactionPlaceholder);
      last = static_cast<std::size_t>(it->position() + it->length());
      ++count;
    }
    next.append(out, last, out.size() - last);
    out = std::move(next);
  }
  return {out, count};
}

bool Cleaner::is_complete(const Document& doc) const {
  if (doc.token_count < static_cast<std::uint64_t>(cfg_.min_tokens)) return false;
  std::size_t end = doc.text.find_last_not_of(" \t\n\r\f\v");
  if (end == std::string::npos) return false;
  return cfg_.terminal_punctuation.find(doc.text[end]) != std::string::npos;
}

bool Cleaner::is_english(const Document& doc) const {
  if (doc.text.empty()) return false;
  return stopword_ratio(doc.text) >= cfg_.english_stopword_ratio_min &&
         ascii_letter_ratio(doc.text) >= cfg_.ascii_letter_ratio_min;
}

Document Cleaner::transform(Document doc) const {
  std::string text = strip_links(doc.text);
  auto [redacted, n] = redact_pii(text);
  if (n > 0) doc.meta["pii_redactions"] = std::to_string(n);
  doc.text = std::move(redacted);
  refresh_derived_fields(doc, tokenizer_);
  return doc;
}

std::optional<RejectionRecord> Cleaner::evaluate(const Document& doc) const {
  if (!is_english(doc)) {
    return RejectionRecord{doc.id, "is_english", "stopword or ascii-letter ratio below threshold"};
  }
  if (!is_complete(doc)) {
    return RejectionRecord{doc.id, "is_complete",
                           doc.token_count < static_cast<std::uint64_t>(cfg_.min_tokens)
                               ? "shorter than min_tokens"
                               : "no terminal punctuation"};
  }
  return std::nullopt;
}

Cleaner::Result Cleaner::clean(std::vector<Document> docs) const {
  Result result;
  result.kept.reserve(docs.size());
  for (auto& doc : docs) {
    std::uint64_t incoming_id = doc.id;
    Document transformed = transform(std::move(doc));
    if (auto rejection = evaluate(transformed)) {
      rejection->doc_id = incoming_id;
      result.rejections.push_back(std::move(*rejection));
    } else {
      result.kept.push_back(std::move(transformed));
    }
  }
  return result;
}

}  // namespace textmill

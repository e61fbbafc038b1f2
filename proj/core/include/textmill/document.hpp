#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace textmill {

class Tokenizer;

// D1: cleaned open-source corpora. D2: LLM-synthesized enrichment data
// (including cosmopedia). D3: NLP-task data (restruct + converted SFT).
enum class Partition { D1, D2, D3 };

std::string_view to_string(Partition p);
Partition partition_from_string(std::string_view s);  // throws ConfigError

struct Document {
  std::uint64_t id = 0;        // content hash of the normalized text
  std::string text;
  std::string source;
  std::string category;
  Partition partition = Partition::D1;
  std::uint64_t token_count = 0;
  std::map<std::string, std::string> meta;
};

// id is a pure function of the text: hash64 of the NFC-normalized,
// whitespace-collapsed form. Stable across runs and machines.
std::uint64_t document_id(std::string_view text);

Document make_document(std::string text, std::string source, std::string category,
                       Partition partition, const Tokenizer& tokenizer,
                       std::map<std::string, std::string> meta = {});

// Re-derives id and token_count from the current text.
void refresh_derived_fields(Document& doc, const Tokenizer& tokenizer);

}  // namespace textmill

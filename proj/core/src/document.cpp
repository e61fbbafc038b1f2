#include "textmill/document.hpp"

#include "textmill/error.hpp"
#include "textmill/hashing.hpp"
#include "textmill/text.hpp"
#include "textmill/tokenizer.hpp"

namespace textmill {

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::D1: return "D1";
    case Partition::D2: return "D2";
    case Partition::D3: return "D3";
  }
  return "D1";
}

Partition partition_from_string(std::string_view s) {
  if (s == "D1") return Partition::D1;
  if (s == "D2") return Partition::D2;
  if (s == "D3") return Partition::D3;
  throw ConfigError("invalid partition: " + std::string(s));
}

std::uint64_t document_id(std::string_view text) {
  return hash64(normalize_for_id(text));
}

Document make_document(std::string text, std::string source, std::string category,
                       Partition partition, const Tokenizer& tokenizer,
                       std::map<std::string, std::string> meta) {
  Document doc;
  doc.text = std::move(text);
  doc.source = std::move(source);
  doc.category = std::move(category);
  doc.partition = partition;
  doc.meta = std::move(meta);
  refresh_derived_fields(doc, tokenizer);
  return doc;
}

void refresh_derived_fields(Document& doc, const Tokenizer& tokenizer) {
  doc.id = document_id(doc.text);
  doc.token_count = tokenizer.count(doc.text);
}

}  // namespace textmill

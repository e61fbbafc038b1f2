#include "textmill/tokenizer.hpp"

#include "textmill/error.hpp"
#include "textmill/text.hpp"

namespace textmill {

namespace {

class WhitespaceTokenizer final : public Tokenizer {
 public:
  const std::string& id() const override {
    static const std::string kId = "whitespace";
    return kId;
  }

  std::size_t count(std::string_view text) const override {
    std::size_t n = 0;
    bool in_token = false;
    for (unsigned char c : text) {
      bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
      if (!space && !in_token) ++n;
      in_token = !space;
    }
    return n;
  }

  std::vector<std::string> units(std::string_view text) const override {
    return whitespace_split(text);
  }
};

}  // namespace

TokenizerRegistry::TokenizerRegistry() {
  tokenizers_.push_back(std::make_unique<WhitespaceTokenizer>());
}

TokenizerRegistry& TokenizerRegistry::instance() {
  static TokenizerRegistry registry;
  return registry;
}

void TokenizerRegistry::add(std::unique_ptr<Tokenizer> tokenizer) {
  tokenizers_.push_back(std::move(tokenizer));
}

bool TokenizerRegistry::has(const std::string& id) const {
  for (const auto& t : tokenizers_) {
    if (t->id() == id) return true;
  }
  return false;
}

const Tokenizer& TokenizerRegistry::get(const std::string& id) const {
  for (const auto& t : tokenizers_) {
    if (t->id() == id) return *t;
  }
  throw ConfigError("unknown tokenizer_id: " + id);
}

std::size_t count_tokens(std::string_view text, const std::string& tokenizer_id) {
  return TokenizerRegistry::instance().get(tokenizer_id).count(text);
}

}  // namespace textmill

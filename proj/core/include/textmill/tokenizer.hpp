#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace textmill {

// Token counting is pluggable so thresholds stay meaningful if a model
// tokenizer is registered later. The default "whitespace" tokenizer counts
// whitespace-separated units.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual const std::string& id() const = 0;
  virtual std::size_t count(std::string_view text) const = 0;
  virtual std::vector<std::string> units(std::string_view text) const = 0;
};

class TokenizerRegistry {
 public:
  static TokenizerRegistry& instance();

  void add(std::unique_ptr<Tokenizer> tokenizer);
  bool has(const std::string& id) const;
  // Throws ConfigError for an unknown id.
  const Tokenizer& get(const std::string& id) const;

 private:
  TokenizerRegistry();
  std::vector<std::unique_ptr<Tokenizer>> tokenizers_;
};

std::size_t count_tokens(std::string_view text, const std::string& tokenizer_id);

}  // namespace textmill

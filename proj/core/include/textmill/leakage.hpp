#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "textmill/benchmark_sample.hpp"
#include "textmill/llm_client.hpp"

namespace textmill {

enum class ParaphraseMethod { SentenceRewrite, OptionReorder };
std::string_view to_string(ParaphraseMethod m);

struct ParaphrasePair {
  BenchmarkSample original;
  BenchmarkSample rewritten;
  ParaphraseMethod method = ParaphraseMethod::SentenceRewrite;
};

std::string to_jsonl_line(const ParaphrasePair& p);
std::vector<ParaphrasePair> load_paraphrase_pairs(const std::string& path);
void save_paraphrase_pairs(const std::vector<ParaphrasePair>& pairs,
                           const std::string& path);

// Greedy deterministic continuation over the adapter's token units
// (whitespace words for adapters without their own tokenizer).
class ModelAdapter {
 public:
  virtual ~ModelAdapter() = default;
  virtual std::vector<std::string> generate(const std::vector<std::string>& prefix,
                                            std::size_t n_tokens) = 0;
  virtual std::string name() const = 0;
};

// Adapter over a subprocess speaking line-delimited JSON on stdin/stdout:
//   request  {"prefix": ["w1", ...], "n_tokens": 5}
//   response {"tokens": ["w1", ...]}
class SubprocessAdapter final : public ModelAdapter {
 public:
  explicit SubprocessAdapter(std::string command, std::string display_name = "");
  ~SubprocessAdapter() override;
  std::vector<std::string> generate(const std::vector<std::string>& prefix,
                                    std::size_t n_tokens) override;
  std::string name() const override { return name_; }

 private:
  void start();
  std::string command_;
  std::string name_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
};

// Mock models for fixtures and smoke runs.

// Replays the true continuation for any prefix of a known text.
class MemorizerAdapter final : public ModelAdapter {
 public:
  explicit MemorizerAdapter(const std::vector<BenchmarkSample>& known);
  std::vector<std::string> generate(const std::vector<std::string>& prefix,
                                    std::size_t n_tokens) override;
  std::string name() const override { return "memorizer"; }

 private:
  std::vector<std::vector<std::string>> texts_;
};

// Emits tokens uniformly at random from a vocabulary (seeded, stateful).
class UniformRandomAdapter final : public ModelAdapter {
 public:
  UniformRandomAdapter(std::vector<std::string> vocabulary, std::uint64_t seed);
  std::vector<std::string> generate(const std::vector<std::string>& prefix,
                                    std::size_t n_tokens) override;
  std::string name() const override { return "uniform-random"; }

 private:
  std::vector<std::string> vocab_;
  std::uint64_t state_;
};

// Always answers a fixed token first (e.g. the gold letter supplied per call
// via set_next); used to pin scorer behavior.
class ConstantAdapter final : public ModelAdapter {
 public:
  explicit ConstantAdapter(std::vector<std::string> tokens)
      : tokens_(std::move(tokens)) {}
  std::vector<std::string> generate(const std::vector<std::string>&,
                                    std::size_t n_tokens) override {
    std::vector<std::string> out = tokens_;
    out.resize(n_tokens, out.empty() ? "" : out.back());
    return out;
  }
  std::string name() const override { return "constant"; }

 private:
  std::vector<std::string> tokens_;
};

struct ParaphraseConfig {
  std::uint64_t seed = 0;
  int max_attempts = 3;
  // Ships as a reasonable default; not a canonical rewrite instruction.
  std::string rewrite_prompt =
      "Rewrite the following text with a different sentence structure but the exact "
      "same meaning. Reply with only the rewritten text.\n{content}";
};

struct ParaphraseBuildResult {
  std::vector<ParaphrasePair> pairs;
  std::vector<std::string> excluded;  // one log line per dropped sample
};

// One pair per input sample: options present -> deterministic seeded option
// reorder (answer identity preserved); otherwise a sentence rewrite through
// the endpoint. Samples whose rewrite fails validation after max_attempts
// are excluded and logged.
ParaphraseBuildResult build_paraphrases(const std::vector<BenchmarkSample>& samples,
                                        ChatEndpoint* endpoint,
                                        const ParaphraseConfig& cfg);

struct FivegramConfig {
  int cut_points = 5;  // evenly spaced, all in the second half of the text
  int gram = 5;
};

struct FivegramResult {
  double score = 0.0;  // 100 * hits / (cut_points * evaluated)
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // samples with fewer than 2*gram words
  std::size_t hits = 0;
  std::size_t trials = 0;
};

// At each cut the model greedily continues the prefix; a hit is an exact
// match of the next `gram` reference tokens.
FivegramResult fivegram_accuracy(ModelAdapter& model,
                                 const std::vector<BenchmarkSample>& samples,
                                 const FivegramConfig& cfg = {});

// delta = score on originals - score on rewritten; negative means the model
// did better on the rewrites.
double compute_delta(double d_original, double d_rewritten);

struct MmluResult {
  double score = 0.0;  // 100 * correct / total
  std::size_t correct = 0;
  std::size_t total = 0;
};

// Zero-shot MCQ scoring: prompt is the question plus lettered options; the
// response is the first non-whitespace character of the generation,
// case-folded, against the gold option's letter.
MmluResult mmlu_zero_shot_score(ModelAdapter& model,
                                const std::vector<BenchmarkSample>& samples,
                                std::size_t max_tokens = 8);

struct DeltaRow {
  std::string model;
  BenchmarkId benchmark = BenchmarkId::MMLU;
  Split split = Split::Train;
  double d_prime = 0.0;  // rewritten
  double d = 0.0;        // original
  double delta = 0.0;    // d - d_prime
};

struct DeltaReport {
  std::vector<DeltaRow> rows;

  std::string to_json() const;
  static DeltaReport from_json(const std::string& json_text);
};

// %.2f with trailing zeros trimmed ("28.80" -> "28.8", "8.00" -> "8").
std::string format_score(double v);

// "31.56, 66.57, 35.01 | 28.8, 39.74, 10.94" (train | test; "-" for absent).
std::string format_row_scores(const DeltaReport& report, const std::string& model,
                              BenchmarkId benchmark);

// Aligned text table grouped by benchmark, one row per model, train and test
// triples. Values are rounded only here, at render time.
std::string render_delta_table(const DeltaReport& report);

}  // namespace textmill

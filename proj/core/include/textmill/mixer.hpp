#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "textmill/document.hpp"
#include "textmill/jsonl.hpp"
#include "textmill/manifest.hpp"

namespace textmill {

struct StagePlan {
  int stage_id = 0;  // 1 or 2
  std::int64_t token_budget = 0;
  std::set<Partition> active_partitions;
};

// Two-stage schedule: stage 1 trains on D1 alone for stage1_tokens, stage 2
// on all partitions for the remainder. stage1_tokens must be < total_tokens.
std::vector<StagePlan> plan_schedule(const MixtureSpec& spec, std::int64_t total_tokens,
                                     std::int64_t stage1_tokens);

std::string schedule_to_json(const std::vector<StagePlan>& plans);

// A replayable document stream; reset() rewinds to the beginning.
class DocSource {
 public:
  virtual ~DocSource() = default;
  virtual std::optional<Document> next() = 0;
  virtual void reset() = 0;
};

class VectorDocSource final : public DocSource {
 public:
  explicit VectorDocSource(std::vector<Document> docs) : docs_(std::move(docs)) {}
  std::optional<Document> next() override {
    if (pos_ >= docs_.size()) return std::nullopt;
    return docs_[pos_++];
  }
  void reset() override { pos_ = 0; }

 private:
  std::vector<Document> docs_;
  std::size_t pos_ = 0;
};

class FileDocSource final : public DocSource {
 public:
  FileDocSource(std::vector<std::string> globs, ReadPolicy policy = {});
  std::optional<Document> next() override;  // malformed lines are skipped
  void reset() override;

 private:
  std::vector<std::string> files_;
  ReadPolicy policy_;
  std::unique_ptr<DocumentReader> reader_;
};

enum class ExhaustPolicy {
  Reloop,       // rewind the source and keep drawing (multi-epoch); default
  Renormalize,  // drop the source; remaining weights renormalize implicitly
};

struct InterleaveConfig {
  std::int64_t token_budget = 0;
  std::uint64_t seed = 0;
  ExhaustPolicy exhaust = ExhaustPolicy::Reloop;
};

struct SourceState {
  std::string name;
  double weight = 0.0;
  std::uint64_t emitted_tokens = 0;
  std::uint64_t emitted_docs_epoch = 0;  // consumed in the current epoch
  std::uint64_t epoch = 0;
  bool exhausted = false;
};

struct InterleaveState {
  std::vector<SourceState> sources;
  std::int64_t total_tokens = 0;
  std::uint64_t total_docs = 0;

  std::string to_json() const;
  static InterleaveState from_json(const std::string& json_text);
};

// Weighted interleave: each draw picks the source with the lowest
// emitted-tokens/weight ratio (largest deficit against its target share),
// seeded-hash tie-break. Emits until cumulative tokens reach the budget.
// Deterministic for a fixed seed and spec.
class Interleaver {
 public:
  // Weights come from the spec in percent; zero-weight sources are ignored.
  // A nonzero-weight source whose stream is empty at start throws ConfigError.
  Interleaver(std::vector<std::pair<WeightEntry, DocSource*>> sources,
              InterleaveConfig cfg);

  std::optional<Document> next();

  const InterleaveState& state() const { return state_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Resumes from a saved state: rewinds every source and skips the documents
  // already emitted in its current epoch, so the suffix replays exactly.
  void restore(const InterleaveState& saved);

 private:
  struct Entry {
    WeightEntry weight;
    DocSource* source = nullptr;
    std::optional<Document> buffered;
    std::uint64_t tie_key = 0;
  };
  std::optional<Document> pull(std::size_t i);

  std::vector<Entry> entries_;
  InterleaveConfig cfg_;
  InterleaveState state_;
  std::vector<std::string> warnings_;
};

}  // namespace textmill
